use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use vn_criterion::SignalKind;

#[derive(Debug, Parser)]
#[command(name = "vncrit", version, about = "Quantumness criterion toolkit")]
pub struct Cli {
    /// Worker threads for parallel sections (results do not depend on it)
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..=256))]
    pub workers: u16,

    /// Write the report here instead of standard output
    #[arg(short = 'o', long, global = true)]
    pub output: Option<PathBuf>,

    /// Report format; csv is available for `hv sample`
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Operator inequality checks and the violation margin
    #[command(subcommand)]
    Criterion(CriterionCmd),
    /// Product hidden-variable models
    #[command(subcommand)]
    Hv(HvCmd),
    /// Classical interferometer realization of qubit observables
    #[command(subcommand)]
    Optics(OpticsCmd),
    /// Coherent-state phase-space feasibility
    #[command(subcommand)]
    Phasespace(PhasespaceCmd),
    /// Run the full pipeline on the canonical pair
    Paper(PaperArgs),
}

#[derive(Debug, Subcommand)]
pub enum CriterionCmd {
    /// Validate a pair; with --state, also evaluate the criterion on it
    Check(CheckArgs),
    /// Find the state maximizing <A^2> - <B^2>
    Optimize(OptimizeArgs),
    /// Random sweep over commuting valid pairs
    Sweep(SweepArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CheckArgs {
    /// Pair file {"a": matrix, "b": matrix}
    #[arg(long)]
    pub pair: PathBuf,
    /// State file {"amplitudes": [...]} or {"rho": matrix}
    #[arg(long)]
    pub state: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct OptimizeArgs {
    /// Pair file {"a": matrix, "b": matrix}
    #[arg(long)]
    pub pair: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    /// Sample commuting pairs (the only supported sweep)
    #[arg(long)]
    pub commuting: bool,
    /// Number of random pairs
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Hilbert-space dimension
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum HvCmd {
    /// Build the product model for (A, B), or (A, B, B-A) with --triple
    Build(BuildArgs),
    /// Draw joint outcomes from a model
    Sample(SampleArgs),
    /// Audit sampled valuations of a triple model
    Audit(SampleArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct BuildArgs {
    /// Include C = B - A as a third observable
    #[arg(long)]
    pub triple: bool,
    /// Pair file {"a": matrix, "b": matrix}
    #[arg(long)]
    pub pair: PathBuf,
    /// State file {"amplitudes": [...]} or {"rho": matrix}
    #[arg(long)]
    pub state: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    /// Model from `hv build` (bare or inside a report)
    #[arg(long)]
    pub model: PathBuf,
    /// Number of draws
    #[arg(short = 'n', long = "n", default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum OpticsCmd {
    /// Time-integrated detector average for a classical signal
    Simulate(SimulateArgs),
    /// Classical average against the quantum expectation
    Compare(CompareArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// 2x2 observable, {"observable": matrix} or a bare matrix
    #[arg(long)]
    pub observable: PathBuf,
    /// Input amplitudes as '[re,im],[re,im]'
    #[arg(long, allow_hyphen_values = true)]
    pub amplitudes: String,
    /// constant, gaussian-noise or chirp
    #[arg(long, default_value = "constant")]
    pub signal: SignalKind,
    /// Signal length in samples
    #[arg(long, default_value_t = 4096)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    /// 2x2 observable, {"observable": matrix} or a bare matrix
    #[arg(long)]
    pub observable: PathBuf,
    /// Input amplitudes as '[re,im],[re,im]'
    #[arg(long, allow_hyphen_values = true)]
    pub amplitudes: String,
}

#[derive(Debug, Subcommand)]
pub enum PhasespaceCmd {
    /// Grid P-distribution feasibility for the quantum moments
    Feasibility(FeasibilityArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct FeasibilityArgs {
    /// Pair file {"a": matrix, "b": matrix}
    #[arg(long)]
    pub pair: PathBuf,
    /// State file {"amplitudes": [...]} or {"rho": matrix}
    #[arg(long)]
    pub state: PathBuf,
    /// Half-width of the square grid in the complex plane
    #[arg(long, default_value_t = vn_criterion::phasespace::DEFAULT_RADIUS)]
    pub radius: f64,
    /// Points per axis (odd, at least 3)
    #[arg(long, default_value_t = vn_criterion::phasespace::DEFAULT_RESOLUTION)]
    pub resolution: usize,
    /// Two-sided slack on each moment constraint
    #[arg(long, default_value_t = vn_criterion::phasespace::DEFAULT_DELTA)]
    pub delta: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct PaperArgs {
    /// Seed for the sampled stages
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}
