use std::ops::{Index, IndexMut};

use crate::scalar::{creal, cz, Scalar, C};

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<C<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![cz(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = creal(T::one());
        }
        m
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = creal(d);
        }
        m
    }

    /// Builds from a flat row-major buffer of length `dim * dim`.
    pub(crate) fn from_flat(dim: usize, data: Vec<C<T>>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        Self { dim, data }
    }

    /// Outer product `v w†`.
    pub fn outer(v: &[C<T>], w: &[C<T>]) -> Self {
        let dim = v.len();
        debug_assert_eq!(dim, w.len());
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * w[j].conj();
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> Vec<Vec<C<T>>> {
        self.data
            .chunks(self.dim.max(1))
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    /// Largest entry modulus, ‖M‖_max.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim).fold(cz(), |acc, i| acc + self[(i, i)])
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let n = self.dim;
        debug_assert_eq!(n, rhs.dim);
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] = out.data[i * n + j] + a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C<T>]) -> Vec<C<T>> {
        let n = self.dim;
        (0..n)
            .map(|i| (0..n).fold(cz(), |acc, j| acc + self[(i, j)] * v[j]))
            .collect()
    }

    /// `v† M v`.
    pub fn quadratic_form(&self, v: &[C<T>]) -> C<T> {
        let mv = self.matvec(v);
        v.iter()
            .zip(&mv)
            .fold(cz(), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn zip_with(&self, rhs: &Self, f: impl Fn(C<T>, C<T>) -> C<T>) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    /// `(M + M†)/2`.
    pub fn symmetrized(&self) -> Self {
        let half = T::of(0.5);
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = (self[(i, j)] + self[(j, i)].conj()) * half;
            }
        }
        m
    }

    /// max |M_jk − conj(M_kj)|.
    pub fn hermiticity_deviation(&self) -> T {
        let n = self.dim;
        let mut dev = T::zero();
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.dim + j]
    }
}

pub(crate) fn vec_norm<T: Scalar>(v: &[C<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

pub(crate) fn inner<T: Scalar>(v: &[C<T>], w: &[C<T>]) -> C<T> {
    v.iter().zip(w).fold(cz(), |acc, (a, b)| acc + a.conj() * b)
}

/// Modified Gram-Schmidt on `vectors` in place, in index order.
/// Returns false if some vector collapsed to (numerically) zero.
pub(crate) fn gram_schmidt<T: Scalar>(vectors: &mut [Vec<C<T>>]) -> bool {
    let tiny = T::epsilon() * T::of(16.0);
    for k in 0..vectors.len() {
        for prev in 0..k {
            let (head, tail) = vectors.split_at_mut(k);
            let proj = inner(&head[prev], &tail[0]);
            for (x, p) in tail[0].iter_mut().zip(&head[prev]) {
                *x = *x - *p * proj;
            }
        }
        let n = vec_norm(&vectors[k]);
        if n <= tiny {
            return false;
        }
        for x in vectors[k].iter_mut() {
            *x = *x / n;
        }
    }
    true
}
