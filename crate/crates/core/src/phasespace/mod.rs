//! Coherent-state symbols and classical P-distribution feasibility.
//!
//! A classical functional model represents each observable `X` by its
//! Q-symbol `X_Q(α) = ⟨α|X|α⟩` and the state by a probability density over
//! phase space. On a finite grid that becomes a linear feasibility problem:
//! find weights `p_k ≥ 0`, `Σ p_k = 1`, whose averages of `A_Q`, `A_Q²`,
//! `B_Q`, `B_Q²` match the quantum moments within `δ`.
//!
//! Since `0 ≤ A_Q ≤ B_Q` pointwise for a valid triple, any nonnegative `p`
//! gives `E[A_Q²] ≤ E[B_Q²]`; a criterion violation larger than `2δ` is
//! therefore certified infeasible.

mod simplex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::criterion::{check_triple, CriterionError};
use crate::opalg::{same_dim, DensityMatrix, HermitianOperator, OpError};
use crate::rng::run_indexed;
use crate::scalar::{Scalar, C};
use simplex::{Phase1, SimplexFailure};

/// Largest Fock-space truncation for Q-symbols.
pub const MAX_FOCK_DIM: usize = 16;

pub const DEFAULT_RADIUS: f64 = 4.0;
pub const DEFAULT_RESOLUTION: usize = 61;
pub const DEFAULT_DELTA: f64 = 1e-6;

/// Phase-1 residual at or below this counts as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Slack allowed in the pointwise operator-order check.
pub const ORDER_TOL: f64 = 1e-10;

const Q_RESIDUE_TOL: f64 = 1e-12;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhaseSpaceError {
    #[error(transparent)]
    Op(#[from] OpError),
    #[error(transparent)]
    Criterion(#[from] CriterionError),
    #[error("operator dimension {0} exceeds the Fock truncation {MAX_FOCK_DIM}")]
    DimensionTooLarge(usize),
    #[error("Q-symbol has imaginary residue {0:e}")]
    ImaginaryResidue(f64),
    #[error("grid resolution {0} must be odd and at least 3")]
    BadResolution(usize),
    #[error("grid radius {0} must be positive and finite")]
    BadRadius(f64),
    #[error("moment slack {0} must be positive and finite")]
    BadDelta(f64),
    #[error("feasibility solve failed: {0}")]
    SolverFailure(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PhasePoint<T: Scalar> {
    pub alpha: C<T>,
}

/// Square lattice over `[−r, r]²` in `(Re α, Im α)`, row-major in `Re α`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PhaseSpaceGrid<T: Scalar> {
    pub points: Vec<PhasePoint<T>>,
    pub radius: T,
    pub resolution: usize,
}

impl<T: Scalar> PhaseSpaceGrid<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the lattice point nearest to `alpha`.
    pub fn nearest(&self, alpha: C<T>) -> usize {
        let mut best = 0;
        let mut dist = T::infinity();
        for (k, p) in self.points.iter().enumerate() {
            let d = (p.alpha - alpha).norm_sqr();
            if d < dist {
                best = k;
                dist = d;
            }
        }
        best
    }
}

pub fn build_grid<T: Scalar>(
    radius: T,
    resolution: usize,
) -> Result<PhaseSpaceGrid<T>, PhaseSpaceError> {
    if !(radius.is_finite() && radius > T::zero()) {
        return Err(PhaseSpaceError::BadRadius(radius.as_f64()));
    }
    if resolution < 3 || resolution.is_multiple_of(2) {
        return Err(PhaseSpaceError::BadResolution(resolution));
    }
    let span = T::from_usize(resolution - 1).unwrap();
    let coord = |i: usize| {
        // Exact zero at the centre index.
        radius * (T::from_usize(2 * i).unwrap() - span) / span
    };
    let points = (0..resolution)
        .flat_map(|i| (0..resolution).map(move |j| (i, j)))
        .map(|(i, j)| PhasePoint {
            alpha: C::new(coord(i), coord(j)),
        })
        .collect();
    Ok(PhaseSpaceGrid {
        points,
        radius,
        resolution,
    })
}

/// `⟨α|X|α⟩` with `X` embedded on Fock states `|0⟩..|d−1⟩`.
pub fn q_symbol<T: Scalar>(x: &HermitianOperator<T>, alpha: C<T>) -> Result<T, PhaseSpaceError> {
    let d = x.dim();
    if d > MAX_FOCK_DIM {
        return Err(PhaseSpaceError::DimensionTooLarge(d));
    }
    // c_n = αⁿ / √n!
    let mut coeffs = Vec::with_capacity(d);
    let mut c = C::new(T::one(), T::zero());
    for n in 0..d {
        if n > 0 {
            c = c * alpha / T::from_usize(n).unwrap().sqrt();
        }
        coeffs.push(c);
    }
    let value = x.matrix().quadratic_form(&coeffs) * (-alpha.norm_sqr()).exp();
    let limit = T::tol(Q_RESIDUE_TOL) * T::one().max(x.max_abs());
    if value.im.abs() > limit {
        return Err(PhaseSpaceError::ImaginaryResidue(value.im.as_f64()));
    }
    Ok(value.re)
}

/// Q-symbols of `x` at every grid point, in grid order.
pub fn q_table<T: Scalar>(
    x: &HermitianOperator<T>,
    grid: &PhaseSpaceGrid<T>,
    workers: usize,
) -> Result<Vec<T>, PhaseSpaceError> {
    let rows = run_indexed(grid.resolution, workers, |i| {
        let start = i * grid.resolution;
        grid.points[start..start + grid.resolution]
            .iter()
            .map(|p| q_symbol(x, p.alpha))
            .collect::<Result<Vec<T>, _>>()
    });
    let mut out = Vec::with_capacity(grid.len());
    for row in rows {
        out.extend(row?);
    }
    Ok(out)
}

/// Target values for `E[A_Q]`, `E[A_Q²]`, `E[B_Q]`, `E[B_Q²]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MomentTargets<T: Scalar> {
    pub mean_a: T,
    pub sq_a: T,
    pub mean_b: T,
    pub sq_b: T,
}

impl<T: Scalar> MomentTargets<T> {
    /// Quantum moments `Tr(ρA)`, `Tr(ρA²)`, `Tr(ρB)`, `Tr(ρB²)`.
    pub fn quantum(
        a: &HermitianOperator<T>,
        b: &HermitianOperator<T>,
        rho: &DensityMatrix<T>,
    ) -> Result<Self, OpError> {
        Ok(Self {
            mean_a: rho.expectation(a)?,
            sq_a: rho.expectation(&a.square())?,
            mean_b: rho.expectation(b)?,
            sq_b: rho.expectation(&b.square())?,
        })
    }

    /// Moments of a point mass at `alpha` under the functional model.
    pub fn point_mass(
        a: &HermitianOperator<T>,
        b: &HermitianOperator<T>,
        alpha: C<T>,
    ) -> Result<Self, PhaseSpaceError> {
        let qa = q_symbol(a, alpha)?;
        let qb = q_symbol(b, alpha)?;
        Ok(Self {
            mean_a: qa,
            sq_a: qa * qa,
            mean_b: qb,
            sq_b: qb * qb,
        })
    }

    fn as_array(&self) -> [T; 4] {
        [self.mean_a, self.sq_a, self.mean_b, self.sq_b]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MomentConstraint<T: Scalar> {
    pub label: String,
    pub target: T,
    pub lower: T,
    pub upper: T,
    /// Value at the solver's final point.
    pub achieved: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FeasibilityResult<T: Scalar> {
    pub status: FeasibilityStatus,
    /// Minimal total constraint excess beyond the `δ` band (phase-1 optimum).
    pub residual: T,
    /// Grid weights, present only when feasible.
    pub witness: Option<Vec<T>>,
    pub constraints_used: Vec<MomentConstraint<T>>,
    pub delta: T,
    pub pivots: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PointwiseOrderSummary<T: Scalar> {
    pub points: usize,
    pub min_a_q: T,
    /// max over the grid of `A_Q − B_Q`.
    pub max_order_excess: T,
    pub holds: bool,
}

/// Checks `0 ≤ A_Q(α) ≤ B_Q(α)` at every grid point.
pub fn pointwise_order<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
    grid: &PhaseSpaceGrid<T>,
    workers: usize,
) -> Result<PointwiseOrderSummary<T>, PhaseSpaceError> {
    let qa = q_table(a, grid, workers)?;
    let qb = q_table(b, grid, workers)?;
    let min_a_q = qa.iter().copied().fold(T::infinity(), T::min);
    let max_order_excess = qa
        .iter()
        .zip(&qb)
        .map(|(x, y)| *x - *y)
        .fold(T::neg_infinity(), T::max);
    let tol = T::tol(ORDER_TOL);
    Ok(PointwiseOrderSummary {
        points: grid.len(),
        min_a_q,
        max_order_excess,
        holds: min_a_q >= -tol && max_order_excess <= tol,
    })
}

/// Is there a nonnegative grid distribution reproducing the quantum moments
/// of `(A, B, ρ)` under the functional model, within `delta`?
pub fn classical_p_feasibility<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
    rho: &DensityMatrix<T>,
    grid: &PhaseSpaceGrid<T>,
    delta: T,
) -> Result<FeasibilityResult<T>, PhaseSpaceError> {
    let validity = check_triple(a, b)?;
    if !validity.holds() {
        let failed = [
            (validity.a_psd, "A"),
            (validity.b_psd, "B"),
            (validity.diff_psd, "B-A"),
        ]
        .iter()
        .filter(|(ok, _)| !ok)
        .map(|(_, n)| n.to_string())
        .collect();
        return Err(CriterionError::InvalidTriple {
            failed,
            min_eigs: validity.min_eigs.map(Scalar::as_f64),
        }
        .into());
    }
    same_dim(a.dim(), rho.dim())?;
    let targets = MomentTargets::quantum(a, b, rho)?;
    feasibility_for_targets(a, b, &targets, grid, delta, 1)
}

/// Phase-1 feasibility for explicit moment targets.
///
/// Columns: grid weights `p_k`, then per moment `i` a band variable
/// `z_i ∈ [0, 2δ]` (with its bound slack) and two artificials, then the
/// normalization artificial. The residual is the sum of artificials at the
/// optimum, i.e. the L1 excess beyond the `±δ` band plus any normalization
/// deficit.
pub fn feasibility_for_targets<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
    targets: &MomentTargets<T>,
    grid: &PhaseSpaceGrid<T>,
    delta: T,
    workers: usize,
) -> Result<FeasibilityResult<T>, PhaseSpaceError> {
    if !(delta.is_finite() && delta > T::zero()) {
        return Err(PhaseSpaceError::BadDelta(delta.as_f64()));
    }
    same_dim(a.dim(), b.dim())?;
    let qa = q_table(a, grid, workers)?;
    let qb = q_table(b, grid, workers)?;
    let features: [Vec<T>; 4] = [
        qa.clone(),
        qa.iter().map(|x| *x * *x).collect(),
        qb.clone(),
        qb.iter().map(|x| *x * *x).collect(),
    ];
    let target = targets.as_array();
    let labels = ["E[A_Q]", "E[A_Q^2]", "E[B_Q]", "E[B_Q^2]"];

    let npts = grid.len();
    // Column layout.
    let z = |i: usize| npts + 4 * i;
    let w = |i: usize| npts + 4 * i + 1;
    let r_minus = |i: usize| npts + 4 * i + 2;
    let r_plus = |i: usize| npts + 4 * i + 3;
    let a0 = npts + 16;
    let ncols = a0 + 1;

    let mut rows = Vec::with_capacity(9);
    let mut rhs = Vec::with_capacity(9);
    let mut basis = Vec::with_capacity(9);

    let mut norm_row = vec![T::zero(); ncols];
    norm_row[..npts].iter_mut().for_each(|x| *x = T::one());
    norm_row[a0] = T::one();
    rows.push(norm_row);
    rhs.push(T::one());
    basis.push(a0);

    for i in 0..4 {
        // Σ f p − z + r⁻ − r⁺ = t − δ
        let mut row = vec![T::zero(); ncols];
        row[..npts].copy_from_slice(&features[i]);
        row[z(i)] = -T::one();
        row[r_minus(i)] = T::one();
        row[r_plus(i)] = -T::one();
        let mut b_i = target[i] - delta;
        let mut basic = r_minus(i);
        if b_i < T::zero() {
            row.iter_mut().for_each(|x| *x = -*x);
            b_i = -b_i;
            basic = r_plus(i);
        }
        rows.push(row);
        rhs.push(b_i);
        basis.push(basic);
    }
    for i in 0..4 {
        let mut row = vec![T::zero(); ncols];
        row[z(i)] = T::one();
        row[w(i)] = T::one();
        rows.push(row);
        rhs.push(delta + delta);
        basis.push(w(i));
    }

    let mut cost = vec![T::zero(); ncols];
    cost[a0] = T::one();
    for i in 0..4 {
        cost[r_minus(i)] = T::one();
        cost[r_plus(i)] = T::one();
    }

    let solution = Phase1 {
        rows,
        rhs,
        cost,
        basis,
    }
    .solve(MAX_PIVOTS)
    .map_err(|e| match e {
        SimplexFailure::IterationLimit(n) => {
            PhaseSpaceError::SolverFailure(format!("no convergence after {n} pivots"))
        }
        SimplexFailure::Unbounded => PhaseSpaceError::SolverFailure("unbounded phase-1 ray".into()),
    })?;

    let weights = &solution.x[..npts];
    let constraints_used = (0..4)
        .map(|i| MomentConstraint {
            label: labels[i].to_string(),
            target: target[i],
            lower: target[i] - delta,
            upper: target[i] + delta,
            achieved: weights.iter().zip(&features[i]).map(|(p, f)| *p * *f).sum(),
        })
        .collect();

    let residual = solution.objective.max(T::zero());
    let feasible = residual <= T::tol(FEASIBILITY_TOL);
    let witness = feasible.then(|| {
        let total: T = weights.iter().copied().sum();
        weights.iter().map(|p| *p / total).collect()
    });
    Ok(FeasibilityResult {
        status: if feasible {
            FeasibilityStatus::Feasible
        } else {
            FeasibilityStatus::Infeasible
        },
        residual,
        witness,
        constraints_used,
        delta,
        pivots: solution.iterations,
    })
}
