//! Report envelope and per-command result payloads.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use vn_criterion::hvmodels::Tag;
use vn_criterion::{
    criterion, opalg, Complex, CriterionReport, EmpiricalReport, FeasibilityResult,
    InterferometerTuning, MomentTargets, OpticsResult, OutcomeRow, PointwiseOrderSummary,
    QuantumComparison, SignalDescription, SweepReport, TripleValidity, ValuationAudit,
};

pub const SCHEMA: &str = "vn-criterion/1";
pub const TOOL_NAME: &str = "vncrit";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
        }
    }
}

/// Every report: a reproducibility header plus the command's result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report<R> {
    pub schema: String,
    pub tool: ToolInfo,
    pub command: String,
    pub config: serde_json::Value,
    pub seeds: BTreeMap<String, u64>,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    pub timestamp: u64,
    pub result: R,
}

/// Numerical thresholds in effect for criterion reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative to max(1, max |entry|).
    pub hermiticity: f64,
    /// Relative to max(1, max |entry|).
    pub psd: f64,
    pub trace: f64,
    pub violation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity: opalg::HERMITICITY_TOL,
            psd: opalg::PSD_TOL,
            trace: opalg::TRACE_TOL,
            violation: criterion::VIOLATION_TOL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub validity: TripleValidity,
    /// Present when a state was given.
    pub report: Option<CriterionReport>,
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub validity: TripleValidity,
    pub margin: f64,
    pub amplitudes: Vec<Complex>,
    pub report: CriterionReport,
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub sweep: SweepReport,
    pub tolerances: Tolerances,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleResult {
    pub tags: Vec<Tag>,
    pub report: EmpiricalReport,
    pub rows: Vec<OutcomeRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditResult {
    pub audit: ValuationAudit,
    pub sum_rule_tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateResult {
    pub tuning: InterferometerTuning,
    pub signal: SignalDescription,
    #[serde(flatten)]
    pub optics: OpticsResult,
    pub quantum_reference: f64,
    pub deviation: f64,
    pub cancellation_tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareResult {
    pub tuning: InterferometerTuning,
    #[serde(flatten)]
    pub comparison: QuantumComparison,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub targets: MomentTargets,
    pub violation_margin: f64,
    #[serde(flatten)]
    pub feasibility: FeasibilityResult,
    pub pointwise_order: PointwiseOrderSummary,
    pub feasibility_tolerance: f64,
    pub warnings: Vec<String>,
}

/// One row of the moment comparison table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub tag: Tag,
    pub power: u32,
    pub model: f64,
    pub quantum: f64,
    pub deviation: f64,
    pub empirical: f64,
    pub sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpticsRow {
    pub observable: String,
    pub classical: f64,
    pub quantum: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSummary {
    pub amplitudes: Vec<Complex>,
    pub norm_sq: f64,
    /// Probability of the basis state |1>, i.e. of outcome 0 of `A`.
    pub prob_one: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaperPipelineReport {
    pub validity: TripleValidity,
    pub optimal_state: StateSummary,
    pub margin: f64,
    pub reference_state: StateSummary,
    pub criterion: CriterionReport,
    pub hv_pair_moments: Vec<MomentRow>,
    pub hv_pair_max_deviation: f64,
    pub hv_audit: ValuationAudit,
    /// Exact probability that a run of the triple model has v(B) < v(A).
    pub hv_audit_exact_negative_diff: f64,
    pub optics: Vec<OpticsRow>,
    pub optics_deviation: f64,
    pub lp_targets: MomentTargets,
    pub lp: FeasibilityResult,
    pub verdict_lines: Vec<String>,
}
