use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar the whole toolkit is generic over (`f32` or `f64`).
///
/// Every tolerance in this crate is written down once, calibrated for `f64`,
/// and converted through [`Scalar::tol`]. Lower-precision types widen the
/// tolerance by [`Scalar::TOLERANCE_SCALE`].
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Multiplier applied to f64-calibrated tolerances.
    const TOLERANCE_SCALE: f64;

    /// Converts an f64 literal. Panics only on values the type cannot hold,
    /// which never happens for the finite constants used here.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant not representable")
    }

    /// An f64-calibrated tolerance expressed in this scalar type.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::of(x * Self::TOLERANCE_SCALE)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const TOLERANCE_SCALE: f64 = 1.0;
}

impl Scalar for f32 {
    const TOLERANCE_SCALE: f64 = 1e5;
}

pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn cz<T: Scalar>() -> C<T> {
    C::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn creal<T: Scalar>(x: T) -> C<T> {
    C::new(x, T::zero())
}

#[inline]
pub(crate) fn is_finite_c<T: Scalar>(z: &C<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
