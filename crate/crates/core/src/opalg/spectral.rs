use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::matrix::{gram_schmidt, CMatrix};
use super::OpError;
use crate::scalar::{creal, cz, Scalar, C};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues below this gap (relative to `max(1, ‖M‖_max)`) form one cluster.
pub const CLUSTER_GAP: f64 = 1e-8;

/// Smallest modulus a component must have to fix an eigenvector's phase.
pub const PHASE_PIVOT: f64 = 1e-8;

/// Ascending eigenvalues with orthonormal eigenvectors.
///
/// The phase of each eigenvector is fixed: its first component with modulus
/// above [`PHASE_PIVOT`] is real and nonnegative. Two decompositions of the
/// same operator are therefore bit-identical.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SpectralDecomposition<T: Scalar> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: Vec<Vec<C<T>>>,
}

/// A group of eigenvalues closer than the cluster gap, with its eigenvectors.
#[derive(Clone, Debug)]
pub struct EigenCluster<T: Scalar> {
    /// Mean of the clustered eigenvalues.
    pub value: T,
    pub indices: Vec<usize>,
}

impl<T: Scalar> SpectralDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max_eigenvalue(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or_else(T::zero)
    }

    /// Σᵢ λᵢ vᵢvᵢ†.
    pub fn reconstruct(&self) -> CMatrix<T> {
        let n = self.dim();
        let mut m = CMatrix::zeros(n);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = m[(i, j)] + v[i] * v[j].conj() * *lambda;
                }
            }
        }
        m
    }

    /// Groups consecutive eigenvalues whose gap is below `gap`.
    pub fn clusters(&self, gap: T) -> Vec<EigenCluster<T>> {
        let mut out: Vec<EigenCluster<T>> = Vec::new();
        let mut start = 0;
        for i in 1..=self.dim() {
            let split = i == self.dim() || self.eigenvalues[i] - self.eigenvalues[i - 1] >= gap;
            if split {
                let idx: Vec<usize> = (start..i).collect();
                let sum: T = idx.iter().map(|&k| self.eigenvalues[k]).sum();
                let value = sum / T::from_usize(idx.len()).unwrap();
                out.push(EigenCluster {
                    value,
                    indices: idx,
                });
                start = i;
            }
        }
        out
    }

    /// Spectral projector onto the span of the given eigenvectors.
    pub fn projector(&self, indices: &[usize]) -> CMatrix<T> {
        let n = self.dim();
        let mut p = CMatrix::zeros(n);
        for &k in indices {
            let v = &self.eigenvectors[k];
            for i in 0..n {
                for j in 0..n {
                    p[(i, j)] = p[(i, j)] + v[i] * v[j].conj();
                }
            }
        }
        p
    }
}

pub(crate) fn fix_phase<T: Scalar>(v: &mut [C<T>]) {
    let pivot = T::of(PHASE_PIVOT);
    if let Some(z) = v.iter().find(|z| z.norm() > pivot).copied() {
        let r = z.norm();
        let phase = z.conj() / r;
        for x in v.iter_mut() {
            *x = *x * phase;
        }
        // The pivot component is real by construction; drop rounding residue.
        if let Some(p) = v.iter_mut().find(|x| x.norm() > pivot) {
            *p = creal(p.norm());
        }
    }
}

/// Cyclic complex Jacobi eigensolver for a Hermitian matrix.
pub(crate) fn decompose<T: Scalar>(m: &CMatrix<T>) -> Result<SpectralDecomposition<T>, OpError> {
    let n = m.dim();
    let mut a = m.clone();
    let mut v = CMatrix::<T>::identity(n);

    let frob = m.as_slice().iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    let size = T::from_usize(n.max(1)).unwrap();
    let done = T::epsilon() * frob * size * T::of(4.0);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= done {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= T::min_positive_value() {
                    continue;
                }
                rotate(&mut a, &mut v, p, q, apq, r);
            }
        }
    }
    if !converged {
        return Err(OpError::ConvergenceFailure { sweeps: MAX_SWEEPS });
    }

    let mut pairs: Vec<(T, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
    pairs.sort_by(|x, y| {
        x.0.partial_cmp(&y.0)
            .unwrap_or(Ordering::Equal)
            .then(x.1.cmp(&y.1))
    });

    let eigenvalues: Vec<T> = pairs.iter().map(|p| p.0).collect();
    let mut eigenvectors: Vec<Vec<C<T>>> = pairs
        .iter()
        .map(|&(_, col)| {
            let mut vec: Vec<C<T>> = (0..n).map(|row| v[(row, col)]).collect();
            fix_phase(&mut vec);
            vec
        })
        .collect();

    let mut decomposition = SpectralDecomposition {
        eigenvalues,
        eigenvectors: Vec::new(),
    };
    let gap = T::of(CLUSTER_GAP) * T::one().max(m.max_abs());
    for cluster in decomposition.clusters(gap) {
        if cluster.indices.len() < 2 {
            continue;
        }
        let mut block: Vec<Vec<C<T>>> = cluster
            .indices
            .iter()
            .map(|&k| eigenvectors[k].clone())
            .collect();
        if !gram_schmidt(&mut block) {
            return Err(OpError::ConvergenceFailure { sweeps: MAX_SWEEPS });
        }
        for (mut vec, &k) in block.into_iter().zip(&cluster.indices) {
            fix_phase(&mut vec);
            eigenvectors[k] = vec;
        }
    }
    decomposition.eigenvectors = eigenvectors;
    Ok(decomposition)
}

fn off_diagonal_norm<T: Scalar>(a: &CMatrix<T>) -> T {
    let n = a.dim();
    let mut sum = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum = sum + a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Applies the unitary J that zeroes `a[p][q]`: A ← J†AJ, V ← VJ.
fn rotate<T: Scalar>(a: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize, apq: C<T>, r: T) {
    let n = a.dim();
    let two = T::of(2.0);
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (two * r);
    let sign = if theta >= T::zero() {
        T::one()
    } else {
        -T::one()
    };
    let t = sign / (theta.abs() + (theta * theta + T::one()).sqrt());
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let phase_conj = (apq / r).conj();

    let j_pp = creal(c);
    let j_pq = creal(s);
    let j_qp = phase_conj * (-s);
    let j_qq = phase_conj * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * j_pp + akq * j_qp;
        a[(k, q)] = akp * j_pq + akq * j_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a[(p, q)] = cz();
    a[(q, p)] = cz();
    a[(p, p)] = creal(a[(p, p)].re);
    a[(q, q)] = creal(a[(q, q)].re);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * j_pp + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * j_qq;
    }
}
