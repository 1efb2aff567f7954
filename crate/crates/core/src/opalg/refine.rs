//! Born weights accurate to a few ulps.
//!
//! Eigenvectors stored in working precision are orthonormal only up to a few
//! ulps, and `Σₖ λₖ² ⟨vₖ|ρ|vₖ⟩` amplifies that defect by `λ²`. One
//! Ogita–Aishima refinement step, with its residual products accumulated in
//! doubled precision, moves each eigenvector to `hi + lo` with `lo` small; the
//! weights are then evaluated on the refined vectors.

use super::matrix::CMatrix;
use super::spectral::SpectralDecomposition;
use crate::scalar::{Scalar, C};

/// Double-word accumulator (error-free products via fma).
#[derive(Clone, Copy)]
struct Acc<T> {
    hi: T,
    lo: T,
}

impl<T: Scalar> Acc<T> {
    fn zero() -> Self {
        Self {
            hi: T::zero(),
            lo: T::zero(),
        }
    }

    fn add(&mut self, x: T) {
        let s = self.hi + x;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (x - bb);
        self.hi = s;
        self.lo = self.lo + err;
    }

    fn add_prod(&mut self, a: T, b: T) {
        let p = a * b;
        self.add(p);
        self.lo = self.lo + a.mul_add(b, -p);
    }

    fn add_scaled(&mut self, a: T, w: Acc<T>) {
        self.add_prod(a, w.hi);
        self.lo = self.lo + a * w.lo;
    }

    fn value(self) -> T {
        self.hi + self.lo
    }
}

#[derive(Clone, Copy)]
struct CAcc<T> {
    re: Acc<T>,
    im: Acc<T>,
}

impl<T: Scalar> CAcc<T> {
    fn zero() -> Self {
        Self {
            re: Acc::zero(),
            im: Acc::zero(),
        }
    }

    /// `self += a · b`
    fn add_prod(&mut self, a: C<T>, b: C<T>) {
        self.re.add_prod(a.re, b.re);
        self.re.add_prod(-a.im, b.im);
        self.im.add_prod(a.re, b.im);
        self.im.add_prod(a.im, b.re);
    }

    /// `self += conj(a) · w`
    fn add_conj_scaled(&mut self, a: C<T>, w: CAcc<T>) {
        self.re.add_scaled(a.re, w.re);
        self.re.add_scaled(a.im, w.im);
        self.im.add_scaled(a.re, w.im);
        self.im.add_scaled(-a.im, w.re);
    }

    fn value(self) -> C<T> {
        C::new(self.re.value(), self.im.value())
    }
}

/// `M v` with each entry accumulated in doubled precision.
fn apply<T: Scalar>(m: &CMatrix<T>, v: &[C<T>]) -> Vec<CAcc<T>> {
    let n = m.dim();
    (0..n)
        .map(|i| {
            let mut acc = CAcc::zero();
            for (j, x) in v.iter().enumerate() {
                acc.add_prod(m[(i, j)], *x);
            }
            acc
        })
        .collect()
}

/// `u† w` in doubled precision.
fn inner_acc<T: Scalar>(u: &[C<T>], w: &[CAcc<T>]) -> CAcc<T> {
    let mut acc = CAcc::zero();
    for (a, b) in u.iter().zip(w) {
        acc.add_conj_scaled(*a, *b);
    }
    acc
}

/// Refined eigenvalues and Born weights `⟨vₖ|ρ|vₖ⟩`, one per eigenpair of
/// `s`. Pairs closer than `gap` are only re-orthonormalized, not rotated.
pub(crate) fn refined_born<T: Scalar>(
    m: &CMatrix<T>,
    s: &SpectralDecomposition<T>,
    rho: &CMatrix<T>,
    gap: T,
) -> (Vec<T>, Vec<T>) {
    let n = s.dim();
    let v = &s.eigenvectors;
    let one = CAcc {
        re: Acc {
            hi: T::one(),
            lo: T::zero(),
        },
        im: Acc::zero(),
    };

    let mv: Vec<Vec<CAcc<T>>> = v.iter().map(|vk| apply(m, vk)).collect();
    let id: Vec<Vec<CAcc<T>>> = v
        .iter()
        .map(|vk| {
            vk.iter()
                .map(|z| CAcc {
                    re: Acc {
                        hi: z.re,
                        lo: T::zero(),
                    },
                    im: Acc {
                        hi: z.im,
                        lo: T::zero(),
                    },
                })
                .collect()
        })
        .collect();

    // R = I − V†V, S = V†MV.
    let mut r = vec![vec![C::new(T::zero(), T::zero()); n]; n];
    let mut sm = vec![vec![C::new(T::zero(), T::zero()); n]; n];
    for i in 0..n {
        for j in 0..n {
            let g = inner_acc(&v[i], &id[j]);
            let mut d = if i == j { one } else { CAcc::zero() };
            d.re.add(-g.re.hi);
            d.re.add(-g.re.lo);
            d.im.add(-g.im.hi);
            d.im.add(-g.im.lo);
            r[i][j] = d.value();
            sm[i][j] = inner_acc(&v[i], &mv[j]).value();
        }
    }

    let values: Vec<T> = (0..n)
        .map(|i| sm[i][i].re / (T::one() - r[i][i].re))
        .collect();
    let half = T::of(0.5);
    let mut e = vec![vec![C::new(T::zero(), T::zero()); n]; n];
    for i in 0..n {
        for j in 0..n {
            e[i][j] = if i != j && (values[j] - values[i]).abs() > gap {
                (sm[i][j] + r[i][j] * values[j]) / (values[j] - values[i])
            } else {
                r[i][j] * half
            };
        }
    }

    let weights = (0..n)
        .map(|k| {
            // Refined vector: v_k + Σᵢ vᵢ E_ik.
            let lo: Vec<C<T>> = (0..n)
                .map(|l| {
                    (0..n).fold(C::new(T::zero(), T::zero()), |acc, i| {
                        acc + v[i][l] * e[i][k]
                    })
                })
                .collect();
            let rho_v = apply(rho, &v[k]);
            let main = inner_acc(&v[k], &rho_v).re.value();
            let cross: T = lo
                .iter()
                .zip(&rho_v)
                .map(|(a, b)| (a.conj() * b.value()).re)
                .sum();
            main + cross + cross
        })
        .collect();
    (values, weights)
}
