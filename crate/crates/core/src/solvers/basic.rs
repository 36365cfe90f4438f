use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::equilibrate_rows;
use crate::subsets::{binomial, filter_map, Budget, Exec};

use super::l0::solve_on_support;
use super::pnorm::lp_pow_sum;
use super::{check_exponent, SparseProblem, SparseSolution};

/// Coefficients at or below `COEF_TOL · ‖x‖_∞` make a basic solution degenerate.
pub const COEF_TOL: f64 = 1e-9;

/// Relative tolerance for treating two objective values as tied.
const TIE_TOL: f64 = 1e-12;

/// Every nondegenerate basic solution: supports with `|S| ≤ rows`, full
/// column rank, consistent, and no vanishing coefficient.
pub fn basic_solutions(prob: &SparseProblem, budget: &Budget) -> Result<Vec<SparseSolution>> {
    let (a, b) = (prob.a(), prob.b());
    let n = a.cols();
    if prob.b_norm() == 0.0 {
        return Ok(vec![SparseSolution {
            support: Vec::new(),
            x: vec![0.0; n],
        }]);
    }
    let max_level = a.rows().min(n);
    budget.check((1..=max_level).map(|s| binomial(n, s)).sum())?;
    let eq = equilibrate_rows(a);
    let mut out = Vec::new();
    for s in 1..=max_level {
        out.extend(filter_map(Exec::default(), n, s, |sup| {
            let sol = solve_on_support(a, &eq, b, sup)?;
            let max = sol.x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            sup.iter()
                .all(|&j| sol.x[j].abs() > COEF_TOL * max)
                .then_some(sol)
        }));
    }
    if out.is_empty() {
        return Err(Error::Infeasible("b has no basic solution".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpBasicResult {
    pub p: f64,
    /// Minimal `‖x‖_p^p` over basic solutions.
    pub value: f64,
    /// All basic solutions within relative `1e-12` of the minimum.
    pub minimizers: Vec<SparseSolution>,
    pub candidates: usize,
}

/// Minimizers of `‖x‖_p^p` among precomputed basic solutions.
pub fn lp_argmin(basics: &[SparseSolution], p: f64) -> Result<LpBasicResult> {
    check_exponent(p)?;
    let values: Vec<f64> = basics.iter().map(|s| lp_pow_sum(&s.x, p)).collect();
    let value = values.iter().copied().fold(f64::INFINITY, f64::min);
    if !value.is_finite() {
        return Err(Error::Infeasible(
            "no basic solutions to minimize over".into(),
        ));
    }
    let cutoff = value + TIE_TOL * value.abs();
    let minimizers = basics
        .iter()
        .zip(&values)
        .filter(|(_, &v)| v <= cutoff)
        .map(|(s, _)| s.clone())
        .collect();
    Ok(LpBasicResult {
        p,
        value,
        minimizers,
        candidates: basics.len(),
    })
}

/// Global `ℓp` minimum over basic solutions.
pub fn solve_lp_basic(prob: &SparseProblem, p: f64, budget: &Budget) -> Result<LpBasicResult> {
    check_exponent(p)?;
    lp_argmin(&basic_solutions(prob, budget)?, p)
}
