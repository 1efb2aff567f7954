//! Numerics for a single-system quantumness test built on operator
//! inequalities, and for the classical models that reproduce its statistics.
//!
//! * [`opalg`]: Hermitian operators, density matrices, spectral data.
//! * [`criterion`]: the inequality test `A ≤ B` yet `⟨A²⟩ > ⟨B²⟩`, its
//!   optimal state, pair generators, and the commuting-pair sweep.
//! * [`hvmodels`]: product hidden-variable models, sampling and valuation
//!   audits.
//! * [`optics`]: classical Mach-Zehnder realization of qubit measurements.
//! * [`phasespace`]: Q-symbols and grid P-distribution feasibility.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix `f64`, which is what the tolerances are calibrated for.

pub mod criterion;
pub mod hvmodels;
pub mod opalg;
pub mod optics;
pub mod phasespace;
pub mod rng;
pub mod scalar;

pub use criterion::{
    canonical_pair, check_triple, commuting_sweep, commuting_valid_pair, evaluate_criterion,
    optimal_violation_state, paper_state_amplitudes, random_valid_pair, CriterionError,
};
pub use hvmodels::{
    audit_valuations, build_pair_model, build_triple_model, joint_eigenbasis_valuation,
    model_moment, sample, HvError, Tag,
};
pub use opalg::{
    commutator_norm, expectation, is_psd, make_hermitian, make_pure_state, op_add, op_square,
    op_sub, spectral_decompose, OpError,
};
pub use optics::{
    compare_with_quantum, generate_signal, simulate, tuning_from_observable, OpticsError,
    SignalDescription, SignalKind,
};
pub use phasespace::{
    build_grid, classical_p_feasibility, q_symbol, FeasibilityStatus, PhaseSpaceError,
};
pub use scalar::Scalar;

pub type Complex = num_complex::Complex<f64>;
pub type HermitianOperator = opalg::HermitianOperator<f64>;
pub type DensityMatrix = opalg::DensityMatrix<f64>;
pub type SpectralDecomposition = opalg::SpectralDecomposition<f64>;
pub type PsdCheck = opalg::PsdCheck<f64>;
pub type TripleValidity = criterion::TripleValidity<f64>;
pub type CriterionReport = criterion::CriterionReport<f64>;
pub type OptimalState = criterion::OptimalState<f64>;
pub type SweepReport = criterion::SweepReport<f64>;
pub type OutcomeAlphabet = hvmodels::OutcomeAlphabet<f64>;
pub type HiddenVariableModel = hvmodels::HiddenVariableModel<f64>;
pub type DispersionFreeValuation = hvmodels::DispersionFreeValuation<f64>;
pub type EmpiricalReport = hvmodels::EmpiricalReport<f64>;
pub type OutcomeRow = hvmodels::OutcomeRow<f64>;
pub type ValuationAudit = hvmodels::ValuationAudit<f64>;
pub type InterferometerTuning = optics::InterferometerTuning<f64>;
pub type ClassicalSignal = optics::ClassicalSignal<f64>;
pub type OpticsResult = optics::OpticsResult<f64>;
pub type QuantumComparison = optics::QuantumComparison<f64>;
pub type PhaseSpaceGrid = phasespace::PhaseSpaceGrid<f64>;
pub type MomentTargets = phasespace::MomentTargets<f64>;
pub type FeasibilityResult = phasespace::FeasibilityResult<f64>;
pub type PointwiseOrderSummary = phasespace::PointwiseOrderSummary<f64>;
