//! Dense tableau simplex for phase-1 problems:
//!
//! minimize c·x  subject to  A x = b,  x ≥ 0,  b ≥ 0,
//!
//! started from a basis of identity columns. Entering and leaving variables
//! follow Bland's rule, so the pivot sequence (and the residual) is fully
//! determined by the input.

use crate::scalar::Scalar;

const REDUCED_COST_TOL: f64 = 1e-12;
const PIVOT_TOL: f64 = 1e-11;

pub(crate) struct Phase1<T> {
    /// Row-major `m × n` constraint matrix.
    pub rows: Vec<Vec<T>>,
    pub rhs: Vec<T>,
    pub cost: Vec<T>,
    /// Initial basic column for each row; each must be a unit column.
    pub basis: Vec<usize>,
}

#[derive(Debug)]
pub(crate) struct Phase1Solution<T> {
    pub x: Vec<T>,
    pub objective: T,
    pub iterations: usize,
}

#[derive(Debug, PartialEq)]
pub(crate) enum SimplexFailure {
    IterationLimit(usize),
    Unbounded,
}

impl<T: Scalar> Phase1<T> {
    pub fn solve(self, max_iterations: usize) -> Result<Phase1Solution<T>, SimplexFailure> {
        let Phase1 {
            mut rows,
            mut rhs,
            cost,
            mut basis,
        } = self;
        let m = rows.len();
        let n = cost.len();
        let rc_tol = T::tol(REDUCED_COST_TOL);
        let piv_tol = T::tol(PIVOT_TOL);

        // Reduced costs r_j = c_j − Σᵢ c_{B(i)} a_ij.
        let mut reduced = cost.clone();
        for (i, row) in rows.iter().enumerate() {
            let cb = cost[basis[i]];
            if cb != T::zero() {
                for (r, a) in reduced.iter_mut().zip(row) {
                    *r = *r - cb * *a;
                }
            }
        }

        let mut iterations = 0;
        while let Some(enter) = (0..n).find(|&j| reduced[j] < -rc_tol) {
            if iterations == max_iterations {
                return Err(SimplexFailure::IterationLimit(iterations));
            }
            iterations += 1;

            let mut leave: Option<(usize, T)> = None;
            for i in 0..m {
                let a = rows[i][enter];
                if a <= piv_tol {
                    continue;
                }
                let ratio = rhs[i] / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((best, best_ratio)) => {
                        if ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[best]) {
                            Some((i, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
            let Some((pivot_row, _)) = leave else {
                return Err(SimplexFailure::Unbounded);
            };

            let pivot = rows[pivot_row][enter];
            for a in rows[pivot_row].iter_mut() {
                *a = *a / pivot;
            }
            rhs[pivot_row] = rhs[pivot_row] / pivot;
            let pivot_vals = rows[pivot_row].clone();
            let pivot_rhs = rhs[pivot_row];
            for i in 0..m {
                if i == pivot_row {
                    continue;
                }
                let factor = rows[i][enter];
                if factor == T::zero() {
                    continue;
                }
                for (a, p) in rows[i].iter_mut().zip(&pivot_vals) {
                    *a = *a - factor * *p;
                }
                rows[i][enter] = T::zero();
                rhs[i] = (rhs[i] - factor * pivot_rhs).max(T::zero());
            }
            let factor = reduced[enter];
            for (r, p) in reduced.iter_mut().zip(&pivot_vals) {
                *r = *r - factor * *p;
            }
            reduced[enter] = T::zero();
            basis[pivot_row] = enter;
        }

        let mut x = vec![T::zero(); n];
        for (i, &col) in basis.iter().enumerate() {
            x[col] = rhs[i];
        }
        let objective = x.iter().zip(&cost).map(|(a, b)| *a * *b).sum();
        Ok(Phase1Solution {
            x,
            objective,
            iterations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_feasible_point() {
        // x0 + x1 = 1, x0 − x1 = 0 via artificials a0, a1.
        let p = Phase1 {
            rows: vec![vec![1.0f64, 1.0, 1.0, 0.0], vec![1.0, -1.0, 0.0, 1.0]],
            rhs: vec![1.0, 0.0],
            cost: vec![0.0, 0.0, 1.0, 1.0],
            basis: vec![2, 3],
        };
        let s = p.solve(100).unwrap();
        assert!(s.objective.abs() < 1e-15);
        assert!((s.x[0] - 0.5).abs() < 1e-15 && (s.x[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn reports_infeasibility_as_positive_objective() {
        // x0 = 1 and x0 = 2 cannot both hold; best L1 miss is 1.
        let p = Phase1 {
            rows: vec![vec![1.0f64, 1.0, 0.0], vec![1.0, 0.0, 1.0]],
            rhs: vec![1.0, 2.0],
            cost: vec![0.0, 1.0, 1.0],
            basis: vec![1, 2],
        };
        let s = p.solve(100).unwrap();
        assert!((s.objective - 1.0).abs() < 1e-15);
    }
}
