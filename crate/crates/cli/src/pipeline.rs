use vn_criterion::hvmodels::Tag;
use vn_criterion::phasespace::{DEFAULT_DELTA, DEFAULT_RADIUS, DEFAULT_RESOLUTION};
use vn_criterion::{
    audit_valuations, build_grid, build_pair_model, build_triple_model, canonical_pair,
    check_triple, classical_p_feasibility, compare_with_quantum, evaluate_criterion, model_moment,
    optimal_violation_state, paper_state_amplitudes, sample, Complex, DensityMatrix,
    FeasibilityStatus, HermitianOperator, MomentTargets,
};

use crate::error::CliError;
use crate::report::{MomentRow, OpticsRow, PaperPipelineReport, StateSummary};

/// Samples drawn for the pair moment check and the triple audit.
pub const PIPELINE_SAMPLES: usize = 100_000;

fn summarize(amplitudes: &[Complex]) -> StateSummary {
    let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
    StateSummary {
        amplitudes: amplitudes.to_vec(),
        norm_sq,
        prob_one: amplitudes[1].norm_sqr() / norm_sq,
    }
}

/// Canonical pair end to end: validity, optimal state, criterion, pair and
/// triple hidden-variable models, interferometer, phase-space LP.
pub fn paper_pipeline(seed: u64, workers: usize) -> Result<PaperPipelineReport, CliError> {
    let (a, b): (HermitianOperator, HermitianOperator) = canonical_pair();
    let validity = check_triple(&a, &b)?;
    validity.require()?;

    let optimal = optimal_violation_state(&a, &b)?;
    let rho = &optimal.rho;
    let criterion = evaluate_criterion(&a, &b, rho)?;

    let reference = paper_state_amplitudes::<f64>();
    let reference_state = summarize(&reference);
    DensityMatrix::pure(&reference)?;

    let pair_model = build_pair_model(&a, &b, rho)?;
    let empirical = sample(&pair_model, PIPELINE_SAMPLES, seed, workers)?;
    let mut hv_pair_moments = Vec::new();
    for (tag, x) in [(Tag::A, &a), (Tag::B, &b)] {
        for power in [1u32, 2] {
            let model = model_moment(&pair_model, tag, power)?;
            let quantum = if power == 1 {
                rho.expectation(x)?
            } else {
                rho.expectation(&x.square())?
            };
            let emp = empirical
                .moments
                .iter()
                .find(|m| m.tag == tag && m.power == power)
                .expect("sample reports every tag and power");
            hv_pair_moments.push(MomentRow {
                tag,
                power,
                model,
                quantum,
                deviation: (model - quantum).abs(),
                empirical: emp.empirical,
                sigma: emp.sigma,
            });
        }
    }
    let hv_pair_max_deviation = hv_pair_moments
        .iter()
        .map(|r| r.deviation)
        .fold(0.0, f64::max);

    let triple_model = build_triple_model(&a, &b, rho)?;
    let hv_audit = audit_valuations(&triple_model, PIPELINE_SAMPLES, seed, workers)?;
    let hv_audit_exact_negative_diff: f64 = triple_model
        .joint()
        .iter()
        .enumerate()
        .filter(|(flat, _)| {
            let v = triple_model.valuation(*flat);
            v.get(Tag::B).unwrap() < v.get(Tag::A).unwrap()
        })
        .map(|(_, p)| *p)
        .sum();

    let c = b.sub(&a)?;
    let amps = [optimal.amplitudes[0], optimal.amplitudes[1]];
    let mut optics = Vec::new();
    for (name, x) in [("A", &a), ("B", &b), ("B-A", &c)] {
        let cmp = compare_with_quantum(x, amps)?;
        optics.push(OpticsRow {
            observable: name.into(),
            classical: cmp.classical,
            quantum: cmp.quantum,
            deviation: cmp.deviation,
        });
    }
    let optics_deviation = optics.iter().map(|r| r.deviation).fold(0.0, f64::max);

    let grid = build_grid(DEFAULT_RADIUS, DEFAULT_RESOLUTION)?;
    let lp_targets = MomentTargets::quantum(&a, &b, rho)?;
    let lp = classical_p_feasibility(&a, &b, rho, &grid, DEFAULT_DELTA)?;

    let min = validity.min_eigs;
    let verdict_lines = vec![
        format!(
            "valid triple: min eigenvalues A {:.6}, B {:.6}, B-A {:.6}",
            min[0].abs(),
            min[1],
            min[2].abs()
        ),
        format!(
            "criterion {} at the optimal state: <A^2> - <B^2> = {:.6}",
            if criterion.violated {
                "violated"
            } else {
                "not violated"
            },
            criterion.violation_margin
        ),
        format!(
            "pair model reproduces <X> and <X^2> for A and B (max deviation {:.1e})",
            hv_pair_max_deviation
        ),
        format!(
            "triple model: v(B) < v(A) in {:.2}% of {} runs (exact {:.2}%), min v(B-A) = {:.6}",
            100.0 * hv_audit.frac_negative_diff,
            hv_audit.samples,
            100.0 * hv_audit_exact_negative_diff,
            hv_audit.min_vc.abs()
        ),
        format!(
            "classical interferometer matches quantum averages of A, B, B-A (max deviation {:.1e})",
            optics_deviation
        ),
        format!(
            "phase-space grid {}x{}: nonnegative P-distribution {} (residual {:.3e}, slack {:.0e})",
            grid.resolution,
            grid.resolution,
            match lp.status {
                FeasibilityStatus::Feasible => "found",
                FeasibilityStatus::Infeasible => "does not exist",
            },
            lp.residual,
            lp.delta
        ),
    ];

    Ok(PaperPipelineReport {
        validity,
        optimal_state: summarize(&optimal.amplitudes),
        margin: optimal.margin,
        reference_state,
        criterion,
        hv_pair_moments,
        hv_pair_max_deviation,
        hv_audit,
        hv_audit_exact_negative_diff,
        optics,
        optics_deviation,
        lp_targets,
        lp,
        verdict_lines,
    })
}
