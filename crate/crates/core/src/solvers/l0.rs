use crate::error::{Error, Result};
use crate::linalg::{columns_dependent, equilibrate_rows, least_squares};
use crate::matrix::DenseMatrix;
use crate::spark::SPARK_RANK_TOL;
use crate::subsets::{binomial, filter_map, Budget, Exec};

use super::{SparseProblem, SparseSolution, SparseSolutionSet};

/// Acceptance threshold for `‖A x − b‖ ≤ tol · ‖b‖`.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Solves `A_S x_S = b` when `A_S` has full column rank and the system is
/// consistent; returns the full-length vector.
///
/// `eq` is the row-equilibrated copy of `a` used for the rank decision.
pub fn solve_on_support(
    a: &DenseMatrix,
    eq: &DenseMatrix,
    b: &[f64],
    support: &[usize],
) -> Option<SparseSolution> {
    if columns_dependent(eq, support, SPARK_RANK_TOL) {
        return None;
    }
    let xs = least_squares(a, support, b)?;
    let mut x = vec![0.0; a.cols()];
    for (&j, &v) in support.iter().zip(&xs) {
        x[j] = v;
    }
    let r = a.mul_vec(&x).ok()?;
    let res = r
        .iter()
        .zip(b)
        .map(|(u, v)| (u - v).powi(2))
        .sum::<f64>()
        .sqrt();
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    (res <= RESIDUAL_TOL * b_norm).then(|| SparseSolution {
        support: support.to_vec(),
        x,
    })
}

/// Every solution of minimal sparsity, by ascending support size.
pub fn solve_l0(prob: &SparseProblem, budget: &Budget) -> Result<SparseSolutionSet> {
    let (a, b) = (prob.a(), prob.b());
    let n = a.cols();
    if prob.b_norm() == 0.0 {
        return Ok(SparseSolutionSet {
            level: 0,
            solutions: vec![SparseSolution {
                support: Vec::new(),
                x: vec![0.0; n],
            }],
        });
    }
    let eq = equilibrate_rows(a);
    let max_level = a.rows().min(n);
    let mut visited: u128 = 0;
    for s in 1..=max_level {
        visited += binomial(n, s);
        budget.check(visited)?;
        let solutions = filter_map(Exec::default(), n, s, |sup| {
            solve_on_support(a, &eq, b, sup)
        });
        if !solutions.is_empty() {
            return Ok(SparseSolutionSet {
                level: s,
                solutions,
            });
        }
    }
    Err(Error::Infeasible(format!(
        "no support of size at most {max_level} reproduces b within {RESIDUAL_TOL} relative residual"
    )))
}
