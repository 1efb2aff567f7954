//! Dense Hermitian operators and density matrices with tolerance-aware
//! positivity checks.
//!
//! All values are immutable once built; constructors validate and
//! re-symmetrize, so downstream code can rely on exact Hermiticity of the
//! stored entries.

mod matrix;
mod refine;
mod spectral;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use matrix::CMatrix;
pub(crate) use refine::refined_born;
pub use spectral::{EigenCluster, SpectralDecomposition, CLUSTER_GAP, PHASE_PIVOT};

pub(crate) use matrix::{gram_schmidt, inner, vec_norm};

use crate::scalar::{creal, is_finite_c, Scalar, C};

/// Largest operator dimension the dense routines accept.
pub const MAX_DIM: usize = 64;

/// Relative Hermiticity tolerance: `1e-12 · max(1, ‖M‖_max)`.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Relative PSD tolerance ε_psd: `1e-9 · max(1, ‖M‖_max)`.
pub const PSD_TOL: f64 = 1e-9;

pub const TRACE_TOL: f64 = 1e-10;

pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-10;

/// Pure-state inputs whose norm² is within this of 1 are renormalized.
pub const NORM_TOL: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpError {
    #[error("matrix is not square ({rows} rows, row {row} has {cols} entries)")]
    NonSquare {
        rows: usize,
        row: usize,
        cols: usize,
    },
    #[error("matrix is empty")]
    Empty,
    #[error("matrix is not Hermitian (deviation {deviation:e} exceeds {tolerance:e})")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("matrix has a non-finite entry")]
    NonFinite,
    #[error("dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("expectation has imaginary residue {residue:e}")]
    ImaginaryResidue { residue: f64 },
    #[error("eigensolver did not converge within {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },
    #[error("amplitude vector is zero")]
    ZeroVector,
    #[error("amplitude norm² {norm_sq} is too far from 1")]
    NormTooFarFromUnit { norm_sq: f64 },
    #[error("state trace {trace} is not 1")]
    TraceNotUnit { trace: f64 },
    #[error("state is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
}

fn check_rows<T: Scalar>(rows: Vec<Vec<C<T>>>) -> Result<CMatrix<T>, OpError> {
    let n = rows.len();
    if n == 0 {
        return Err(OpError::Empty);
    }
    if n > MAX_DIM {
        return Err(OpError::DimensionTooLarge {
            dim: n,
            max: MAX_DIM,
        });
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(OpError::NonSquare {
                rows: n,
                row: i,
                cols: r.len(),
            });
        }
    }
    let flat: Vec<C<T>> = rows.into_iter().flatten().collect();
    if !flat.iter().all(is_finite_c) {
        return Err(OpError::NonFinite);
    }
    Ok(CMatrix::from_flat(n, flat))
}

fn scale_of<T: Scalar>(m: &CMatrix<T>) -> T {
    T::one().max(m.max_abs())
}

/// A Hermitian observable. Stored entries are exactly Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator<T: Scalar> {
    matrix: CMatrix<T>,
}

impl<T: Scalar> HermitianOperator<T> {
    /// Validates Hermiticity within `1e-12·max(1,‖M‖_max)` and stores `(M + M†)/2`.
    pub fn new(rows: Vec<Vec<C<T>>>) -> Result<Self, OpError> {
        Self::from_matrix(check_rows(rows)?)
    }

    pub fn from_matrix(m: CMatrix<T>) -> Result<Self, OpError> {
        if m.dim() == 0 {
            return Err(OpError::Empty);
        }
        if m.dim() > MAX_DIM {
            return Err(OpError::DimensionTooLarge {
                dim: m.dim(),
                max: MAX_DIM,
            });
        }
        if !m.as_slice().iter().all(is_finite_c) {
            return Err(OpError::NonFinite);
        }
        let tolerance = T::tol(HERMITICITY_TOL) * scale_of(&m);
        let deviation = m.hermiticity_deviation();
        if deviation > tolerance {
            return Err(OpError::NotHermitian {
                deviation: deviation.as_f64(),
                tolerance: tolerance.as_f64(),
            });
        }
        Ok(Self {
            matrix: m.symmetrized(),
        })
    }

    /// Real symmetric input, e.g. `[[1.5, 0.5], [0.5, 0.5]]`.
    pub fn from_real(rows: &[Vec<T>]) -> Result<Self, OpError> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| creal(x)).collect())
                .collect(),
        )
    }

    pub fn diagonal(values: &[T]) -> Self {
        Self {
            matrix: CMatrix::from_diagonal(values),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim),
        }
    }

    /// Wraps a matrix known to be Hermitian up to rounding; re-symmetrizes.
    pub(crate) fn from_trusted(m: CMatrix<T>) -> Self {
        Self {
            matrix: m.symmetrized(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> C<T> {
        self.matrix[(i, j)]
    }

    pub fn max_abs(&self) -> T {
        self.matrix.max_abs()
    }

    /// ε_psd for this operator.
    pub fn psd_tolerance(&self) -> T {
        T::tol(PSD_TOL) * scale_of(&self.matrix)
    }

    pub fn spectral(&self) -> Result<SpectralDecomposition<T>, OpError> {
        spectral::decompose(&self.matrix)
    }

    pub fn is_psd(&self) -> Result<PsdCheck<T>, OpError> {
        let min_eigenvalue = self.spectral()?.min_eigenvalue();
        Ok(PsdCheck {
            flag: min_eigenvalue >= -self.psd_tolerance(),
            min_eigenvalue,
        })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, OpError> {
        same_dim(self.dim(), rhs.dim())?;
        Ok(Self::from_trusted(
            self.matrix.zip_with(&rhs.matrix, |a, b| a + b),
        ))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, OpError> {
        same_dim(self.dim(), rhs.dim())?;
        Ok(Self::from_trusted(
            self.matrix.zip_with(&rhs.matrix, |a, b| a - b),
        ))
    }

    pub fn square(&self) -> Self {
        Self::from_trusted(self.matrix.matmul(&self.matrix))
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            matrix: self.matrix.scale(s),
        }
    }

    /// `U diag(values) U†` where the columns of U are `basis`.
    pub(crate) fn from_spectrum(values: &[T], basis: &[Vec<C<T>>]) -> Self {
        let n = values.len();
        let mut m = CMatrix::zeros(n);
        for (lambda, v) in values.iter().zip(basis) {
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = m[(i, j)] + v[i] * v[j].conj() * *lambda;
                }
            }
        }
        Self::from_trusted(m)
    }

    /// max-entry modulus of `[self, other]`.
    pub fn commutator_norm(&self, other: &Self) -> Result<T, OpError> {
        same_dim(self.dim(), other.dim())?;
        let ab = self.matrix.matmul(&other.matrix);
        let ba = other.matrix.matmul(&self.matrix);
        Ok(ab.zip_with(&ba, |x, y| x - y).max_abs())
    }
}

impl<T: Scalar> Serialize for HermitianOperator<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.matrix.rows().serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for HermitianOperator<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<C<T>>>::deserialize(d)?;
        Self::new(rows).map_err(D::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PsdCheck<T: Scalar> {
    pub flag: bool,
    pub min_eigenvalue: T,
}

/// Where a density matrix came from. Pure states remember the amplitudes they
/// were built from, so a renormalization is visible after the fact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", tag = "kind", rename_all = "snake_case")]
pub enum StateSource<T: Scalar> {
    Matrix,
    Pure {
        amplitudes: Vec<C<T>>,
        input_norm_sq: T,
        renormalized: bool,
    },
}

/// A unit-trace positive semidefinite state.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Scalar> {
    matrix: CMatrix<T>,
    source: StateSource<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace (within 1e-10) and positivity
    /// (min eigenvalue ≥ −ε_psd). The stored trace is exactly normalized.
    pub fn new(rows: Vec<Vec<C<T>>>) -> Result<Self, OpError> {
        Self::from_matrix(check_rows(rows)?)
    }

    pub fn from_matrix(m: CMatrix<T>) -> Result<Self, OpError> {
        let h = HermitianOperator::from_matrix(m)?;
        let trace = h.matrix.trace().re;
        if (trace - T::one()).abs() > T::tol(TRACE_TOL) {
            return Err(OpError::TraceNotUnit {
                trace: trace.as_f64(),
            });
        }
        let check = h.is_psd()?;
        if !check.flag {
            return Err(OpError::NotPositive {
                min_eigenvalue: check.min_eigenvalue.as_f64(),
            });
        }
        Ok(Self {
            matrix: h.matrix.scale(T::one() / trace),
            source: StateSource::Matrix,
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let p = T::one() / T::from_usize(dim).unwrap();
        Self {
            matrix: CMatrix::identity(dim).scale(p),
            source: StateSource::Matrix,
        }
    }

    /// Rank-1 projector `vv†/‖v‖²`.
    ///
    /// Inputs whose norm² is within [`NORM_TOL`] of 1 are accepted and
    /// renormalized; the original norm² is kept in [`StateSource::Pure`].
    pub fn pure(amplitudes: &[C<T>]) -> Result<Self, OpError> {
        if amplitudes.is_empty() {
            return Err(OpError::Empty);
        }
        if amplitudes.len() > MAX_DIM {
            return Err(OpError::DimensionTooLarge {
                dim: amplitudes.len(),
                max: MAX_DIM,
            });
        }
        if !amplitudes.iter().all(is_finite_c) {
            return Err(OpError::NonFinite);
        }
        let norm_sq: T = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq == T::zero() {
            return Err(OpError::ZeroVector);
        }
        if (norm_sq - T::one()).abs() > T::of(NORM_TOL) {
            return Err(OpError::NormTooFarFromUnit {
                norm_sq: norm_sq.as_f64(),
            });
        }
        let norm = norm_sq.sqrt();
        let unit: Vec<C<T>> = amplitudes.iter().map(|z| *z / norm).collect();
        let matrix = CMatrix::outer(&unit, &unit).symmetrized();
        Ok(Self {
            matrix,
            source: StateSource::Pure {
                amplitudes: unit,
                input_norm_sq: norm_sq,
                renormalized: norm_sq != T::one(),
            },
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn source(&self) -> &StateSource<T> {
        &self.source
    }

    /// Normalized amplitudes, when the state was built as a pure state.
    pub fn amplitudes(&self) -> Option<&[C<T>]> {
        match &self.source {
            StateSource::Pure { amplitudes, .. } => Some(amplitudes),
            StateSource::Matrix => None,
        }
    }

    /// `⟨v|ρ|v⟩`, the Born weight of a unit vector.
    pub fn weight_of(&self, v: &[C<T>]) -> T {
        self.matrix.quadratic_form(v).re
    }

    /// Tr(ρH); the imaginary part must vanish within 1e-10·max(1,‖H‖_max).
    pub fn expectation(&self, h: &HermitianOperator<T>) -> Result<T, OpError> {
        same_dim(self.dim(), h.dim())?;
        let n = self.dim();
        let mut acc = C::new(T::zero(), T::zero());
        for i in 0..n {
            for j in 0..n {
                acc = acc + self.matrix[(i, j)] * h.matrix[(j, i)];
            }
        }
        let limit = T::tol(IMAGINARY_RESIDUE_TOL) * scale_of(&h.matrix);
        if acc.im.abs() > limit {
            return Err(OpError::ImaginaryResidue {
                residue: acc.im.as_f64(),
            });
        }
        Ok(acc.re)
    }
}

impl<T: Scalar> Serialize for DensityMatrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.matrix.rows().serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for DensityMatrix<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<C<T>>>::deserialize(d)?;
        Self::new(rows).map_err(D::Error::custom)
    }
}

pub(crate) fn same_dim(left: usize, right: usize) -> Result<(), OpError> {
    if left != right {
        return Err(OpError::DimensionMismatch { left, right });
    }
    Ok(())
}

pub fn make_hermitian<T: Scalar>(entries: Vec<Vec<C<T>>>) -> Result<HermitianOperator<T>, OpError> {
    HermitianOperator::new(entries)
}

pub fn spectral_decompose<T: Scalar>(
    h: &HermitianOperator<T>,
) -> Result<SpectralDecomposition<T>, OpError> {
    h.spectral()
}

pub fn is_psd<T: Scalar>(h: &HermitianOperator<T>) -> Result<PsdCheck<T>, OpError> {
    h.is_psd()
}

pub fn expectation<T: Scalar>(
    rho: &DensityMatrix<T>,
    h: &HermitianOperator<T>,
) -> Result<T, OpError> {
    rho.expectation(h)
}

pub fn op_square<T: Scalar>(h: &HermitianOperator<T>) -> HermitianOperator<T> {
    h.square()
}

pub fn op_add<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
) -> Result<HermitianOperator<T>, OpError> {
    a.add(b)
}

pub fn op_sub<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
) -> Result<HermitianOperator<T>, OpError> {
    a.sub(b)
}

pub fn make_pure_state<T: Scalar>(amplitudes: &[C<T>]) -> Result<DensityMatrix<T>, OpError> {
    DensityMatrix::pure(amplitudes)
}

pub fn commutator_norm<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
) -> Result<T, OpError> {
    a.commutator_norm(b)
}
