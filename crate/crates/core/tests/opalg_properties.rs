mod common;

use common::*;
use proptest::prelude::*;
use vn_criterion::{
    expectation, is_psd, op_add, op_square, op_sub, spectral_decompose, Complex, DensityMatrix,
};

fn max_entry(r: &Rows) -> f64 {
    r.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

#[allow(clippy::needless_range_loop)]
fn hermiticity_gap(r: &Rows) -> f64 {
    let d = r.len();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            worst = worst.max((r[i][j] - r[j][i].conj()).norm());
        }
    }
    worst
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn arithmetic_stays_hermitian(
        (x, y) in (1usize..=6).prop_flat_map(|d| (
            prop::collection::vec(-3.0f64..3.0, 2 * d * d),
            prop::collection::vec(-3.0f64..3.0, 2 * d * d),
        ).prop_map(move |(p, q)| (hermitian_from(d, &p), hermitian_from(d, &q))))
    ) {
        for h in [op_add(&x, &y).unwrap(), op_sub(&x, &y).unwrap(), op_square(&x)] {
            let r = rows_of(&h);
            prop_assert_eq!(hermiticity_gap(&r), 0.0);
        }
        let sq = rows_of(&op_square(&x));
        let direct = mul(&rows_of(&x), &rows_of(&x));
        let scale = max_entry(&direct).max(1.0);
        for i in 0..x.dim() {
            for j in 0..x.dim() {
                prop_assert!((sq[i][j] - direct[i][j]).norm() <= 1e-12 * scale);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn spectral_reconstruction(h in hermitian_strategy(8, 10.0)) {
        let s = spectral_decompose(&h).unwrap();
        let d = h.dim();
        let target = rows_of(&h);
        let scale = max_entry(&target).max(1.0);
        for i in 0..d {
            for j in 0..d {
                let mut acc = Complex::new(0.0, 0.0);
                for (lam, v) in s.eigenvalues.iter().zip(&s.eigenvectors) {
                    acc += v[i] * v[j].conj() * *lam;
                }
                prop_assert!((acc - target[i][j]).norm() < 1e-10 * scale);
            }
        }
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        for (a, va) in s.eigenvectors.iter().enumerate() {
            for (b, vb) in s.eigenvectors.iter().enumerate() {
                let ip: Complex = va.iter().zip(vb).map(|(x, y)| x.conj() * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                prop_assert!((ip - want).norm() < 1e-10);
            }
        }
        // Trace and Frobenius norm are basis-independent.
        let tr: f64 = (0..d).map(|i| target[i][i].re).sum();
        prop_assert!((tr - s.eigenvalues.iter().sum::<f64>()).abs() < 1e-10 * scale * d as f64);
    }

    #[test]
    fn decomposition_is_deterministic(h in hermitian_strategy(8, 10.0)) {
        let s1 = spectral_decompose(&h).unwrap();
        let s2 = spectral_decompose(&h).unwrap();
        let separated = s1.eigenvalues.windows(2).all(|w| w[1] - w[0] > 1e-8);
        prop_assume!(separated);
        prop_assert_eq!(&s1.eigenvalues, &s2.eigenvalues);
        for (v1, v2) in s1.eigenvectors.iter().zip(&s2.eigenvectors) {
            for (x, y) in v1.iter().zip(v2) {
                prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
                prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
            let pivot = v1.iter().find(|z| z.norm() > 1e-8).unwrap();
            prop_assert!(pivot.im == 0.0 && pivot.re > 0.0);
        }
    }

    #[test]
    fn psd_expectations_are_nonnegative(
        (h, rho) in (1usize..=6).prop_flat_map(|d| (
            prop::collection::vec(-2.0f64..2.0, 2 * d * d),
            prop::collection::vec(-2.0f64..2.0, 2 * d * d),
        ).prop_map(move |(p, q)| (gram_from(d, &p), mixed_state(d, &q))))
    ) {
        prop_assert!(is_psd(&h).unwrap().flag);
        let e = expectation(&rho, &h).unwrap();
        prop_assert!(e >= -1e-9);
        let oracle = trace_product(&state_rows(&rho), &rows_of(&h));
        prop_assert!((e - oracle).abs() <= 1e-10 * oracle.abs().max(1.0));
    }

    #[test]
    fn qubit_eigenvalues_match_closed_form(h in (prop::collection::vec(-5.0f64..5.0, 8)).prop_map(|r| hermitian_from(2, &r))) {
        let (lo, hi) = eig2(&rows_of(&h));
        let s = spectral_decompose(&h).unwrap();
        prop_assert!((s.eigenvalues[0] - lo).abs() < 1e-12 * hi.abs().max(1.0));
        prop_assert!((s.eigenvalues[1] - hi).abs() < 1e-12 * hi.abs().max(1.0));
        prop_assert_eq!(is_psd(&h).unwrap().flag, lo >= -1e-9 * h.max_abs().max(1.0));
    }

    #[test]
    fn pure_states_are_rank_one_projectors(psi in (1usize..=6).prop_flat_map(amplitudes_strategy)) {
        let rho = DensityMatrix::pure(&psi).unwrap();
        let r = state_rows(&rho);
        let r2 = mul(&r, &r);
        for i in 0..psi.len() {
            for j in 0..psi.len() {
                prop_assert!((r[i][j] - psi[i] * psi[j].conj()).norm() < 1e-12);
                prop_assert!((r2[i][j] - r[i][j]).norm() < 1e-12);
            }
        }
    }
}
