mod common;

use common::*;
use proptest::prelude::*;
use vn_criterion::rng::{random_unit_vector, substream};
use vn_criterion::{
    canonical_pair, check_triple, commutator_norm, commuting_sweep, evaluate_criterion,
    optimal_violation_state, random_valid_pair, DensityMatrix, HermitianOperator,
};

fn pure(psi: &[vn_criterion::Complex]) -> DensityMatrix {
    DensityMatrix::pure(psi).unwrap()
}

#[test]
fn first_moments_respect_the_order() {
    for (pair_seed, dim) in [(1u64, 2usize), (2, 3), (3, 4), (4, 6), (5, 8)] {
        let (a, b): (HermitianOperator, HermitianOperator) =
            random_valid_pair(dim, pair_seed).unwrap();
        assert!(check_triple(&a, &b).unwrap().holds());
        let mut rng = substream(pair_seed, 99);
        for _ in 0..1000 {
            let psi = random_unit_vector(dim, &mut rng);
            let r = evaluate_criterion(&a, &b, &pure(&psi)).unwrap();
            assert!(
                r.first_moment_gap >= -1e-9,
                "gap {} at dim {dim}",
                r.first_moment_gap
            );
        }
    }
}

#[test]
fn optimal_margin_bounds_random_states() {
    for (seed, dim) in [(11u64, 2usize), (12, 3), (13, 4), (14, 5)] {
        let (a, b): (HermitianOperator, HermitianOperator) = random_valid_pair(dim, seed).unwrap();
        let opt = optimal_violation_state(&a, &b).unwrap();
        let (a2, b2) = (
            mul(&rows_of(&a), &rows_of(&a)),
            mul(&rows_of(&b), &rows_of(&b)),
        );
        let mut rng = substream(seed, 7);
        let mut best = f64::NEG_INFINITY;
        for _ in 0..10_000 {
            let psi = random_unit_vector(dim, &mut rng);
            best = best.max(pure_expectation(&psi, &a2) - pure_expectation(&psi, &b2));
        }
        assert!(
            best <= opt.margin + 1e-9,
            "dim {dim}: sample {best} above optimum {}",
            opt.margin
        );
        let at_opt =
            pure_expectation(&opt.amplitudes, &a2) - pure_expectation(&opt.amplitudes, &b2);
        assert!((at_opt - opt.margin).abs() < 1e-9 * opt.margin.abs().max(1.0));
        if dim == 2 {
            let grid = bloch_grid_max(&rows_of(&a), &rows_of(&b));
            let scale = rows_of(&a)
                .iter()
                .flatten()
                .chain(rows_of(&b).iter().flatten())
                .map(|z| z.norm())
                .fold(1.0, f64::max);
            assert!(grid <= opt.margin + 1e-9);
            assert!(opt.margin - grid < 1e-3 * scale * scale);
        }
    }
}

#[test]
fn canonical_margin_matches_grid_search() {
    let (a, b): (HermitianOperator, HermitianOperator) = canonical_pair();
    let opt = optimal_violation_state(&a, &b).unwrap();
    let exact = (5f64.sqrt() - 2.0) / 2.0;
    assert!((opt.margin - exact).abs() < 1e-9);
    assert!((opt.margin - bloch_grid_max(&rows_of(&a), &rows_of(&b))).abs() < 1e-4);
}

#[test]
fn violation_requires_noncommuting_pair() {
    let mut violated = 0;
    for seed in 0..200u64 {
        let dim = 2 + (seed % 4) as usize;
        let (a, b): (HermitianOperator, HermitianOperator) = random_valid_pair(dim, seed).unwrap();
        let opt = optimal_violation_state(&a, &b).unwrap();
        let r = evaluate_criterion(&a, &b, &opt.rho).unwrap();
        if r.violated {
            violated += 1;
            assert!(commutator_norm(&a, &b).unwrap() > 1e-8);
            assert!(r.commutator > 1e-8);
        }
    }
    assert!(
        violated > 0,
        "random pairs never violated; the check above was vacuous"
    );
    let s = commuting_sweep::<f64>(300, 3, 5, 2).unwrap();
    assert_eq!(s.violations, 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn scaling_covariance(seed in 0u64..10_000, dim in 2usize..=4, s in 0.05f64..20.0, state_seed in 0u64..1000) {
        let (a, b): (HermitianOperator, HermitianOperator) = random_valid_pair(dim, seed).unwrap();
        let psi = random_unit_vector(dim, &mut substream(state_seed, 3));
        let rho = pure(&psi);
        let base = evaluate_criterion(&a, &b, &rho).unwrap();
        let scaled = evaluate_criterion(&a.scale(s), &b.scale(s), &rho).unwrap();
        let tol = 1e-10 * s * s * base.sq_a.abs().max(base.sq_b.abs()).max(1.0);
        prop_assert!((scaled.first_moment_gap - s * base.first_moment_gap).abs() < tol);
        prop_assert!((scaled.violation_margin - s * s * base.violation_margin).abs() < tol);
        if s * s * base.violation_margin.abs() > 1e-8 + tol {
            prop_assert_eq!(scaled.violated, base.violated);
        }
    }
}
