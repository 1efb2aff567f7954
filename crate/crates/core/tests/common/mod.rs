//! Reference computations written directly against matrix entries, kept
//! independent of the library's own linear algebra.
#![allow(dead_code)]

use proptest::prelude::*;
use vn_criterion::{Complex, DensityMatrix, HermitianOperator};

pub type Rows = Vec<Vec<Complex>>;

pub fn rows_of(h: &HermitianOperator) -> Rows {
    let d = h.dim();
    (0..d)
        .map(|i| (0..d).map(|j| h.entry(i, j)).collect())
        .collect()
}

pub fn state_rows(rho: &DensityMatrix) -> Rows {
    rho.matrix().rows()
}

pub fn mul(x: &Rows, y: &Rows) -> Rows {
    let d = x.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).map(|k| x[i][k] * y[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Re Tr(ρ X).
pub fn trace_product(rho: &Rows, x: &Rows) -> f64 {
    let d = rho.len();
    (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| (rho[i][j] * x[j][i]).re)
        .sum()
}

/// ⟨ψ|X|ψ⟩ / ⟨ψ|ψ⟩ for a pure state.
pub fn pure_expectation(psi: &[Complex], x: &Rows) -> f64 {
    let d = psi.len();
    let mut acc = Complex::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += psi[i].conj() * x[i][j] * psi[j];
        }
    }
    acc.re / psi.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Eigenvalues (ascending) of a 2×2 Hermitian matrix in closed form.
pub fn eig2(x: &Rows) -> (f64, f64) {
    let (a, d) = (x[0][0].re, x[1][1].re);
    let off = x[0][1].norm();
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + off * off).sqrt();
    (mean - r, mean + r)
}

/// Hermitian part of a matrix given as `2·d²` reals.
pub fn hermitian_from(dim: usize, raw: &[f64]) -> HermitianOperator {
    let z = |i: usize, j: usize| Complex::new(raw[2 * (i * dim + j)], raw[2 * (i * dim + j) + 1]);
    let rows: Rows = (0..dim)
        .map(|i| (0..dim).map(|j| (z(i, j) + z(j, i).conj()) * 0.5).collect())
        .collect();
    HermitianOperator::new(rows).unwrap()
}

/// Gram matrix `M†M`, PSD by construction.
pub fn gram_from(dim: usize, raw: &[f64]) -> HermitianOperator {
    let z = |i: usize, j: usize| Complex::new(raw[2 * (i * dim + j)], raw[2 * (i * dim + j) + 1]);
    let rows: Rows = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| (0..dim).map(|k| z(k, i).conj() * z(k, j)).sum())
                .collect()
        })
        .collect();
    HermitianOperator::new(rows).unwrap()
}

pub fn hermitian_strategy(max_dim: usize, scale: f64) -> impl Strategy<Value = HermitianOperator> {
    (1..=max_dim).prop_flat_map(move |d| {
        prop::collection::vec(-scale..scale, 2 * d * d).prop_map(move |raw| hermitian_from(d, &raw))
    })
}

pub fn amplitudes_strategy(dim: usize) -> impl Strategy<Value = Vec<Complex>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("nonzero", |v| {
            v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3
        })
        .prop_map(|v| {
            let n = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
            v.into_iter()
                .map(|(a, b)| Complex::new(a / n, b / n))
                .collect()
        })
}

/// Random mixed state of dimension `dim`: normalized Gram matrix.
pub fn mixed_state(dim: usize, raw: &[f64]) -> DensityMatrix {
    let g = rows_of(&gram_from(dim, raw));
    let tr: f64 = (0..dim).map(|i| g[i][i].re).sum();
    DensityMatrix::new(
        g.into_iter()
            .map(|r| r.into_iter().map(|z| z / tr).collect())
            .collect(),
    )
    .unwrap()
}

/// Maximum of ⟨A²⟩ − ⟨B²⟩ over pure qubit states on a 1° Bloch-sphere grid.
pub fn bloch_grid_max(a: &Rows, b: &Rows) -> f64 {
    let (a2, b2) = (mul(a, a), mul(b, b));
    let mut best = f64::NEG_INFINITY;
    for t in 0..=180 {
        let theta = (t as f64).to_radians();
        for p in 0..360 {
            let phi = (p as f64).to_radians();
            let psi = [
                Complex::new((theta / 2.0).cos(), 0.0),
                Complex::from_polar((theta / 2.0).sin(), phi),
            ];
            best = best.max(pure_expectation(&psi, &a2) - pure_expectation(&psi, &b2));
        }
    }
    best
}

/// Double-double value `hi + lo` for reference sums.
#[derive(Clone, Copy, Debug)]
pub struct Dd(pub f64, pub f64);

impl Dd {
    pub const ZERO: Dd = Dd(0.0, 0.0);

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd(s, (a - (s - bb)) + (b - bb))
    }

    pub fn add(self, y: Dd) -> Dd {
        let s = Dd::two_sum(self.0, y.0);
        Dd::two_sum(s.0, s.1 + self.1 + y.1)
    }

    pub fn prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd(p, a.mul_add(b, -p))
    }

    pub fn mul(self, y: Dd) -> Dd {
        let p = Dd::prod(self.0, y.0);
        Dd::two_sum(p.0, p.1 + self.0 * y.1 + self.1 * y.0)
    }

    pub fn value(self) -> f64 {
        self.0 + self.1
    }
}

/// Complex double-double.
#[derive(Clone, Copy, Debug)]
pub struct CDd(pub Dd, pub Dd);

impl CDd {
    pub const ZERO: CDd = CDd(Dd::ZERO, Dd::ZERO);

    pub fn from(z: Complex) -> CDd {
        CDd(Dd(z.re, 0.0), Dd(z.im, 0.0))
    }

    pub fn add(self, y: CDd) -> CDd {
        CDd(self.0.add(y.0), self.1.add(y.1))
    }

    pub fn mul(self, y: CDd) -> CDd {
        let neg = Dd(-y.1 .0, -y.1 .1);
        CDd(
            self.0.mul(y.0).add(self.1.mul(neg)),
            self.0.mul(y.1).add(self.1.mul(y.0)),
        )
    }
}

/// Re Tr(ρ Xᵖ) for p ∈ {1, 2}, in double-double arithmetic.
pub fn trace_power_dd(rho: &Rows, x: &Rows, power: u32) -> f64 {
    let d = rho.len();
    let xp: Vec<Vec<CDd>> = match power {
        1 => x
            .iter()
            .map(|r| r.iter().map(|z| CDd::from(*z)).collect())
            .collect(),
        2 => (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        (0..d).fold(CDd::ZERO, |acc, k| {
                            acc.add(CDd::from(x[i][k]).mul(CDd::from(x[k][j])))
                        })
                    })
                    .collect()
            })
            .collect(),
        _ => panic!("power {power}"),
    };
    let mut acc = CDd::ZERO;
    for i in 0..d {
        for j in 0..d {
            acc = acc.add(CDd::from(rho[i][j]).mul(xp[j][i]));
        }
    }
    acc.0.value()
}
