//! The quantumness criterion: for a valid triple `A ≥ 0`, `B ≥ 0`,
//! `B − A ≥ 0`, does some state give `⟨A²⟩ > ⟨B²⟩`?
//!
//! The maximal violation over all states is the top eigenvalue of `A² − B²`,
//! so [`optimal_violation_state`] is an eigenproblem rather than a search.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::opalg::{same_dim, DensityMatrix, HermitianOperator, OpError};
use crate::rng::{complex_gaussian, random_basis, run_indexed, substream, uniform, SeededRng};
use crate::scalar::{Scalar, C};

/// A state violates the criterion when `⟨A²⟩ − ⟨B²⟩` exceeds this.
pub const VIOLATION_TOL: f64 = 1e-8;

/// Amplitudes of the state the criterion is usually illustrated with.
pub const REFERENCE_STATE: [f64; 2] = [0.391, 0.920];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CriterionError {
    #[error(transparent)]
    Op(#[from] OpError),
    #[error("invalid triple: {} not positive semidefinite (min eigenvalues A={:e}, B={:e}, B-A={:e})",
        .failed.join(", "), .min_eigs[0], .min_eigs[1], .min_eigs[2])]
    InvalidTriple {
        failed: Vec<String>,
        min_eigs: [f64; 3],
    },
    #[error("dimension {0} outside 1..=64")]
    BadDimension(usize),
}

/// PSD verdicts for `A`, `B` and `B − A`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TripleValidity<T: Scalar> {
    pub a_psd: bool,
    pub b_psd: bool,
    pub diff_psd: bool,
    /// Minimum eigenvalues of A, B, B−A.
    pub min_eigs: [T; 3],
}

impl<T: Scalar> TripleValidity<T> {
    pub fn holds(&self) -> bool {
        self.a_psd && self.b_psd && self.diff_psd
    }

    pub fn require(&self) -> Result<(), CriterionError> {
        if self.holds() {
            return Ok(());
        }
        let failed = [(self.a_psd, "A"), (self.b_psd, "B"), (self.diff_psd, "B-A")]
            .iter()
            .filter(|(ok, _)| !ok)
            .map(|(_, name)| name.to_string())
            .collect();
        Err(CriterionError::InvalidTriple {
            failed,
            min_eigs: self.min_eigs.map(Scalar::as_f64),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CriterionReport<T: Scalar> {
    pub mean_a: T,
    pub mean_b: T,
    pub sq_a: T,
    pub sq_b: T,
    /// ⟨B⟩ − ⟨A⟩
    pub first_moment_gap: T,
    /// ⟨A²⟩ − ⟨B²⟩
    pub violation_margin: T,
    pub violated: bool,
    pub commutator: T,
}

pub fn check_triple<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
) -> Result<TripleValidity<T>, CriterionError> {
    same_dim(a.dim(), b.dim())?;
    let pa = a.is_psd()?;
    let pb = b.is_psd()?;
    let pd = b.sub(a)?.is_psd()?;
    Ok(TripleValidity {
        a_psd: pa.flag,
        b_psd: pb.flag,
        diff_psd: pd.flag,
        min_eigs: [pa.min_eigenvalue, pb.min_eigenvalue, pd.min_eigenvalue],
    })
}

pub fn evaluate_criterion<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
    rho: &DensityMatrix<T>,
) -> Result<CriterionReport<T>, CriterionError> {
    check_triple(a, b)?.require()?;
    same_dim(a.dim(), rho.dim())?;
    let mean_a = rho.expectation(a)?;
    let mean_b = rho.expectation(b)?;
    let sq_a = rho.expectation(&a.square())?;
    let sq_b = rho.expectation(&b.square())?;
    let violation_margin = sq_a - sq_b;
    Ok(CriterionReport {
        mean_a,
        mean_b,
        sq_a,
        sq_b,
        first_moment_gap: mean_b - mean_a,
        violation_margin,
        violated: violation_margin > T::tol(VIOLATION_TOL),
        commutator: a.commutator_norm(b)?,
    })
}

/// The state maximizing `⟨A²⟩ − ⟨B²⟩`, and that maximum.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimalState<T: Scalar> {
    pub rho: DensityMatrix<T>,
    pub amplitudes: Vec<C<T>>,
    pub margin: T,
}

pub fn optimal_violation_state<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
) -> Result<OptimalState<T>, CriterionError> {
    check_triple(a, b)?.require()?;
    top_of_square_difference(a, b)
}

/// Top eigenpair of `A² − B²`. Within a degenerate top cluster the
/// lowest-index phase-fixed eigenvector is returned.
pub(crate) fn top_of_square_difference<T: Scalar>(
    a: &HermitianOperator<T>,
    b: &HermitianOperator<T>,
) -> Result<OptimalState<T>, CriterionError> {
    let m = a.square().sub(&b.square())?;
    let spectral = m.spectral()?;
    let gap = T::of(crate::opalg::CLUSTER_GAP) * T::one().max(m.max_abs());
    let top = spectral
        .clusters(gap)
        .pop()
        .expect("dimension is at least one");
    let k = top.indices[0];
    let amplitudes = spectral.eigenvectors[k].clone();
    Ok(OptimalState {
        rho: DensityMatrix::pure(&amplitudes)?,
        amplitudes,
        margin: spectral.max_eigenvalue(),
    })
}

/// The qubit pair used throughout the docs and tests:
/// `A = [[1,0],[0,0]]`, `B = [[1.5,0.5],[0.5,0.5]]`.
pub fn canonical_pair<T: Scalar>() -> (HermitianOperator<T>, HermitianOperator<T>) {
    let a = HermitianOperator::diagonal(&[T::one(), T::zero()]);
    let b =
        HermitianOperator::from_real(&[vec![T::of(1.5), T::of(0.5)], vec![T::of(0.5), T::of(0.5)]])
            .expect("canonical B is Hermitian");
    (a, b)
}

pub fn paper_state_amplitudes<T: Scalar>() -> Vec<C<T>> {
    REFERENCE_STATE
        .iter()
        .map(|&x| C::new(T::of(x), T::zero()))
        .collect()
}

fn check_dim(dim: usize) -> Result<(), CriterionError> {
    if dim == 0 || dim > crate::opalg::MAX_DIM {
        return Err(CriterionError::BadDimension(dim));
    }
    Ok(())
}

fn gaussian_gram<T: Scalar>(dim: usize, rng: &mut SeededRng) -> HermitianOperator<T> {
    let m = crate::opalg::CMatrix::<T>::from_flat(
        dim,
        (0..dim * dim).map(|_| complex_gaussian(rng)).collect(),
    );
    HermitianOperator::from_trusted(m.adjoint().matmul(&m))
}

/// `A = M†M`, `B = A + N†N` with complex Gaussian `M`, `N`.
pub fn random_valid_pair<T: Scalar>(
    dim: usize,
    seed: u64,
) -> Result<(HermitianOperator<T>, HermitianOperator<T>), CriterionError> {
    check_dim(dim)?;
    let mut rng = substream(seed, 0);
    let a = gaussian_gram(dim, &mut rng);
    let c = gaussian_gram(dim, &mut rng);
    let b = a.add(&c)?;
    Ok((a, b))
}

fn commuting_pair_from<T: Scalar>(
    dim: usize,
    rng: &mut SeededRng,
) -> (HermitianOperator<T>, HermitianOperator<T>) {
    let basis = random_basis::<T, _>(dim, rng);
    let a: Vec<T> = (0..dim).map(|_| uniform(rng)).collect();
    let c: Vec<T> = (0..dim).map(|_| uniform(rng)).collect();
    let b: Vec<T> = a.iter().zip(&c).map(|(x, y)| *x + *y).collect();
    (
        HermitianOperator::from_spectrum(&a, &basis),
        HermitianOperator::from_spectrum(&b, &basis),
    )
}

/// A pair sharing a random eigenbasis, with eigenvalues `a` and `a + c`
/// drawn uniformly from `[0,1]`.
pub fn commuting_valid_pair<T: Scalar>(
    dim: usize,
    seed: u64,
) -> Result<(HermitianOperator<T>, HermitianOperator<T>), CriterionError> {
    check_dim(dim)?;
    Ok(commuting_pair_from(dim, &mut substream(seed, 0)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SweepReport<T: Scalar> {
    pub trials: usize,
    pub dim: usize,
    pub seed: u64,
    /// `None` when no trial ran.
    pub max_margin: Option<T>,
    pub max_commutator: Option<T>,
    pub violations: usize,
}

/// Runs [`optimal_violation_state`] over `trials` commuting pairs. Trial `t`
/// draws from stream `t + 1` of `seed`; the report does not depend on
/// `workers`.
pub fn commuting_sweep<T: Scalar>(
    trials: usize,
    dim: usize,
    seed: u64,
    workers: usize,
) -> Result<SweepReport<T>, CriterionError> {
    check_dim(dim)?;
    let outcomes = run_indexed(trials, workers, |t| {
        let (a, b) = commuting_pair_from::<T>(dim, &mut substream(seed, t as u64 + 1));
        let margin = optimal_violation_state(&a, &b).map(|s| s.margin)?;
        Ok::<_, CriterionError>((margin, a.commutator_norm(&b)?))
    });
    let mut report = SweepReport {
        trials,
        dim,
        seed,
        max_margin: None,
        max_commutator: None,
        violations: 0,
    };
    for outcome in outcomes {
        let (margin, comm) = outcome?;
        if margin > T::tol(VIOLATION_TOL) {
            report.violations += 1;
        }
        report.max_margin = Some(report.max_margin.map_or(margin, |m: T| m.max(margin)));
        report.max_commutator = Some(report.max_commutator.map_or(comm, |m: T| m.max(comm)));
    }
    Ok(report)
}
