use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use vn_criterion::hvmodels::SUM_RULE_TOL;
use vn_criterion::optics::CANCELLATION_TOL;
use vn_criterion::phasespace::{feasibility_for_targets, pointwise_order, FEASIBILITY_TOL};
use vn_criterion::{
    audit_valuations, build_grid, build_pair_model, build_triple_model, check_triple,
    commuting_sweep, compare_with_quantum, evaluate_criterion, generate_signal,
    optimal_violation_state, sample, simulate, tuning_from_observable, DensityMatrix,
    MomentTargets,
};

use crate::args::*;
use crate::csvio::write_sample_csv;
use crate::error::{CliError, ErrorKind};
use crate::files::{load_model, load_observable, load_pair, load_state, parse_amplitudes};
use crate::pipeline::paper_pipeline;
use crate::report::*;

/// What a command produced, before the envelope is added.
pub(crate) struct Outcome {
    pub command: &'static str,
    pub args: Value,
    pub seeds: BTreeMap<String, u64>,
    pub result: Value,
    pub csv: Option<Vec<u8>>,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn new<A: Serialize, R: Serialize>(
        command: &'static str,
        args: &A,
        result: &R,
    ) -> Result<Self, CliError> {
        Ok(Self {
            command,
            args: to_value(args)?,
            seeds: BTreeMap::new(),
            result: to_value(result)?,
            csv: None,
            warnings: Vec::new(),
        })
    }

    fn seed(mut self, name: &str, seed: u64) -> Self {
        self.seeds.insert(name.into(), seed);
        self
    }
}

fn to_value<S: Serialize>(s: &S) -> Result<Value, CliError> {
    serde_json::to_value(s).map_err(|e| CliError::new(ErrorKind::Internal, e.to_string()))
}

pub(crate) fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let workers = cli.workers as usize;
    if cli.format == Format::Csv && !matches!(cli.command, Command::Hv(HvCmd::Sample(_))) {
        return Err(CliError::new(
            ErrorKind::BadFlag,
            "--format csv is only available for hv sample",
        ));
    }
    match &cli.command {
        Command::Criterion(CriterionCmd::Check(args)) => {
            let pair = load_pair(&args.pair)?;
            let validity = check_triple(&pair.a, &pair.b)?;
            let report = match &args.state {
                Some(path) => Some(evaluate_criterion(&pair.a, &pair.b, &load_state(path)?)?),
                None => None,
            };
            let result = CheckResult {
                validity,
                report,
                tolerances: Tolerances::default(),
            };
            Outcome::new("criterion check", args, &result)
        }
        Command::Criterion(CriterionCmd::Optimize(args)) => {
            let pair = load_pair(&args.pair)?;
            let validity = check_triple(&pair.a, &pair.b)?;
            let opt = optimal_violation_state(&pair.a, &pair.b)?;
            let report = evaluate_criterion(&pair.a, &pair.b, &opt.rho)?;
            let result = OptimizeResult {
                validity,
                margin: opt.margin,
                amplitudes: opt.amplitudes,
                report,
                tolerances: Tolerances::default(),
            };
            Outcome::new("criterion optimize", args, &result)
        }
        Command::Criterion(CriterionCmd::Sweep(args)) => {
            if !args.commuting {
                return Err(CliError::new(
                    ErrorKind::BadFlag,
                    "criterion sweep requires --commuting",
                ));
            }
            let sweep = commuting_sweep(args.trials, args.dim, args.seed, workers)?;
            let result = SweepResult {
                sweep,
                tolerances: Tolerances::default(),
            };
            Ok(Outcome::new("criterion sweep", args, &result)?.seed("sweep", args.seed))
        }
        Command::Hv(HvCmd::Build(args)) => {
            let pair = load_pair(&args.pair)?;
            let rho = load_state(&args.state)?;
            let model = if args.triple {
                build_triple_model(&pair.a, &pair.b, &rho)?
            } else {
                build_pair_model(&pair.a, &pair.b, &rho)?
            };
            Outcome::new("hv build", args, &model)
        }
        Command::Hv(HvCmd::Sample(args)) => {
            let model = load_model(&args.model)?;
            let report = sample(&model, args.n, args.seed, workers)?;
            let rows = report.rows(&model);
            let tags = model.tags();
            let mut outcome = Outcome::new(
                "hv sample",
                args,
                &SampleResult {
                    tags: tags.clone(),
                    report,
                    rows: rows.clone(),
                },
            )?
            .seed("sample", args.seed);
            if cli.format == Format::Csv {
                let mut buf = Vec::new();
                write_sample_csv(&tags, &rows, &mut buf)?;
                outcome.csv = Some(buf);
            }
            Ok(outcome)
        }
        Command::Hv(HvCmd::Audit(args)) => {
            let model = load_model(&args.model)?;
            let audit = audit_valuations(&model, args.n, args.seed, workers)?;
            let result = AuditResult {
                audit,
                sum_rule_tolerance: SUM_RULE_TOL,
            };
            Ok(Outcome::new("hv audit", args, &result)?.seed("audit", args.seed))
        }
        Command::Optics(OpticsCmd::Simulate(args)) => {
            let x = load_observable(&args.observable)?;
            let amps = parse_amplitudes(&args.amplitudes)?;
            let tuning = tuning_from_observable(&x)?;
            let signal = generate_signal(args.signal, args.n, args.seed)?;
            let optics = simulate(&tuning, amps, &signal)?;
            let quantum_reference = DensityMatrix::pure(&amps)?.expectation(&x)?;
            let result = SimulateResult {
                tuning,
                signal: signal.description,
                deviation: (optics.weighted_average - quantum_reference).abs(),
                optics,
                quantum_reference,
                cancellation_tolerance: CANCELLATION_TOL,
            };
            Ok(Outcome::new("optics simulate", args, &result)?.seed("signal", args.seed))
        }
        Command::Optics(OpticsCmd::Compare(args)) => {
            let x = load_observable(&args.observable)?;
            let amps = parse_amplitudes(&args.amplitudes)?;
            let tuning = tuning_from_observable(&x)?;
            let comparison = compare_with_quantum(&x, amps)?;
            Outcome::new(
                "optics compare",
                args,
                &CompareResult { tuning, comparison },
            )
        }
        Command::Phasespace(PhasespaceCmd::Feasibility(args)) => {
            let pair = load_pair(&args.pair)?;
            let rho = load_state(&args.state)?;
            check_triple(&pair.a, &pair.b)?.require()?;
            let grid = build_grid(args.radius, args.resolution)?;
            let targets = MomentTargets::quantum(&pair.a, &pair.b, &rho)?;
            let report = evaluate_criterion(&pair.a, &pair.b, &rho)?;
            let feasibility =
                feasibility_for_targets(&pair.a, &pair.b, &targets, &grid, args.delta, workers)?;
            let order = pointwise_order(&pair.a, &pair.b, &grid, workers)?;
            let mut warnings = Vec::new();
            if report.violated && args.delta >= report.violation_margin / 2.0 {
                warnings.push(format!(
                    "delta {:e} is not below half the violation margin {:e}; infeasibility is no longer guaranteed",
                    args.delta, report.violation_margin
                ));
            }
            let result = FeasibilityReport {
                targets,
                violation_margin: report.violation_margin,
                feasibility,
                pointwise_order: order,
                feasibility_tolerance: FEASIBILITY_TOL,
                warnings: warnings.clone(),
            };
            let mut outcome = Outcome::new("phasespace feasibility", args, &result)?;
            outcome.warnings = warnings;
            Ok(outcome)
        }
        Command::Paper(args) => {
            let report = paper_pipeline(args.seed, workers)?;
            Ok(Outcome::new("paper", args, &report)?
                .seed("sample", args.seed)
                .seed("audit", args.seed))
        }
    }
}

pub(crate) fn resolved_config(cli: &Cli, outcome: &Outcome) -> Value {
    json!({
        "command": outcome.command,
        "workers": cli.workers,
        "format": cli.format,
        "args": outcome.args,
    })
}
