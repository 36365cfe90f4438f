use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, singular_values};
use crate::matrix::DenseMatrix;
use crate::rng::rng_for;
use crate::spark::compute_spark;
use crate::spectral::{gram_spectrum, lemma1_constants};
use crate::subsets::Budget;

/// Sampled audit of `|⟨Ax₁, Ax₂⟩| ≤ c ‖x₁‖ ‖x₂‖` for disjointly supported
/// `x₁, x₂` with `‖xᵢ‖₀ < spark/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossTermReport {
    pub trials: usize,
    pub spark: usize,
    /// Largest admissible support size per vector.
    pub max_support: usize,
    /// `spark < 3` leaves no admissible pair.
    pub degenerate: bool,
    /// `(λ_max − λ_min⁺)/2`.
    pub stated_constant: f64,
    /// `(w² − u²)/2` from the restricted spectra, when within budget.
    pub lemma1_constant: Option<f64>,
    pub worst_sampled_ratio: f64,
    /// Largest `σ_max(A_{S₁}ᵀ A_{S₂})` over the sampled support pairs, the
    /// worst ratio any coefficients on those supports can reach.
    pub worst_exact_ratio: f64,
    pub worst_supports: (Vec<usize>, Vec<usize>),
    pub stated_violations: usize,
    pub exact_stated_violations: usize,
    pub lemma1_violations: Option<usize>,
}

impl CrossTermReport {
    pub fn stated_bound_holds(&self) -> bool {
        self.stated_violations == 0 && self.exact_stated_violations == 0
    }
}

fn cross_sigma(a: &DenseMatrix, s1: &[usize], s2: &[usize]) -> f64 {
    let m = DMatrix::from_fn(s1.len(), s2.len(), |i, j| {
        (0..a.rows())
            .map(|r| a.get(r, s1[i]) * a.get(r, s2[j]))
            .sum()
    });
    singular_values(&m)[0]
}

pub fn cross_term_check(
    a: &DenseMatrix,
    trials: usize,
    seed: u64,
    spark: Option<usize>,
    budget: &Budget,
) -> Result<CrossTermReport> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be positive".into()));
    }
    let spark = match spark {
        Some(s) => s,
        None => compute_spark(a, budget)?.spark,
    };
    let summary = gram_spectrum(a)?;
    let stated_constant = (summary.lambda_max - summary.lambda_min_plus) / 2.0;
    let slack = 1e-12 * summary.lambda_max;
    let max_support = (spark - 1) / 2;
    let mut report = CrossTermReport {
        trials,
        spark,
        max_support,
        degenerate: max_support == 0 || 2 > a.cols(),
        stated_constant,
        lemma1_constant: None,
        worst_sampled_ratio: 0.0,
        worst_exact_ratio: 0.0,
        worst_supports: (Vec::new(), Vec::new()),
        stated_violations: 0,
        exact_stated_violations: 0,
        lemma1_violations: None,
    };
    if report.degenerate {
        return Ok(report);
    }
    let lemma1 = match lemma1_constants(a, Some(spark), budget) {
        Ok(c) => Some((c.w_sq - c.u_sq) / 2.0),
        Err(Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    report.lemma1_constant = lemma1;
    let mut lemma1_violations = 0;
    let mut rng = rng_for(seed, "cross_term");
    let n = a.cols();
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..trials {
        let s1n = rng.random_range(1..=max_support.min(n - 1));
        let s2n = rng.random_range(1..=max_support.min(n - s1n));
        perm.shuffle(&mut rng);
        let mut s1 = perm[..s1n].to_vec();
        let mut s2 = perm[s1n..s1n + s2n].to_vec();
        s1.sort_unstable();
        s2.sort_unstable();
        let mut x1 = vec![0.0; n];
        let mut x2 = vec![0.0; n];
        for &j in &s1 {
            x1[j] = rng.sample(StandardNormal);
        }
        for &j in &s2 {
            x2[j] = rng.sample(StandardNormal);
        }
        let ratio = dot(&a.mul_vec(&x1)?, &a.mul_vec(&x2)?).abs() / (norm2(&x1) * norm2(&x2));
        let exact = cross_sigma(a, &s1, &s2);
        report.worst_sampled_ratio = report.worst_sampled_ratio.max(ratio);
        if exact > report.worst_exact_ratio {
            report.worst_exact_ratio = exact;
            report.worst_supports = (s1.clone(), s2.clone());
        }
        report.stated_violations += usize::from(ratio > stated_constant + slack);
        report.exact_stated_violations += usize::from(exact > stated_constant + slack);
        if let Some(c) = lemma1 {
            lemma1_violations += usize::from(exact > c + slack);
        }
    }
    report.lemma1_violations = lemma1.map(|_| lemma1_violations);
    Ok(report)
}
