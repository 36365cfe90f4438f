use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::componentwise_residual;
use crate::matgen::{
    b_vectors, build_augmented_0, build_augmented_t, build_augmented_t_ordered, build_vandermonde,
    AugmentedSpec, VandermondeSpec,
};
use crate::matrix::DenseMatrix;
use crate::rng::sub_seed;
use crate::spectral::gram_spectrum;
use crate::subsets::Budget;

use super::equivalence::{verify_strict_inequality, EquivalenceReport};
use super::kernel::sample_null;
use super::l0::solve_l0;
use super::pnorm::{is_zero, l0, lp_margin, lp_pow_sum, CompensatedSum, ZERO_FLOOR};
use super::{check_exponent, HarnessOptions, SparseProblem};

/// Relative slack on the entry and tail bounds, which hold with equality in
/// exact arithmetic for the two leading entries.
const BOUND_SLACK: f64 = 1e-12;

/// Natural-log magnitudes above this are not materialized as `f64` vectors.
const LN_REPRESENTABLE: f64 = 600.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Scales {
    /// `ln x_t`; `x_t` itself overflows once `ln(m+1)/p` is large.
    pub ln_x_t: f64,
    pub x_t: f64,
    pub y_t: f64,
}

/// `x_t = (m+1)^{1/p} / (|l₁| t)` and `y_t = 1 / (|l₂| t)`.
pub fn theorem2_sequences(
    m: usize,
    l1_abs: f64,
    l2_abs: f64,
    p_check: f64,
    t: f64,
) -> Result<Theorem2Scales> {
    check_exponent(p_check)?;
    if m == 0 {
        return Err(Error::InvalidInput("m must be positive".into()));
    }
    if !(t >= 1.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "t must be finite and at least 1, got {t}"
        )));
    }
    if !(l2_abs > 0.0 && l1_abs >= l2_abs && l1_abs.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "needs |l1| >= |l2| > 0, got {l1_abs} and {l2_abs}"
        )));
    }
    let ln_x_t = ((m + 1) as f64).ln() / p_check - l1_abs.ln() - t.ln();
    Ok(Theorem2Scales {
        ln_x_t,
        x_t: ln_x_t.exp(),
        y_t: 1.0 / (l2_abs * t),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitStep {
    pub t: f64,
    pub p_star_t: f64,
    pub gap: f64,
}

/// `p*(A⁽ᵗ⁾)` against `p*(A⁽⁰⁾)` with `x_t = y_t = 1/t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitFactReport {
    pub p_star_0: f64,
    pub steps: Vec<LimitStep>,
    pub strictly_decreasing: bool,
    /// Last gap divided by `p*(A⁽⁰⁾)`.
    pub final_relative_gap: f64,
}

pub fn limit_fact(spec: &VandermondeSpec, t_schedule: &[f64]) -> Result<LimitFactReport> {
    if t_schedule.is_empty() {
        return Err(Error::InvalidInput("t schedule is empty".into()));
    }
    let p_star_0 = gram_spectrum(&build_augmented_0(spec)?)?.p_star;
    let mut steps = Vec::with_capacity(t_schedule.len());
    for &t in t_schedule {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidInput(format!("invalid t = {t}")));
        }
        let aug = AugmentedSpec::new(spec.clone(), 1.0 / t, 1.0 / t)?;
        let p_star_t = gram_spectrum(&build_augmented_t(&aug)?)?.p_star;
        steps.push(LimitStep {
            t,
            p_star_t,
            gap: (p_star_t - p_star_0).abs(),
        });
    }
    let strictly_decreasing = steps.windows(2).all(|w| w[1].gap < w[0].gap);
    let final_relative_gap = steps.last().map_or(f64::NAN, |s| s.gap / p_star_0);
    Ok(LimitFactReport {
        p_star_0,
        steps,
        strictly_decreasing,
        final_relative_gap,
    })
}

/// Aggregates over the non-degenerate kernel samples at one `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TStepReport {
    pub t: f64,
    /// `‖x̌(t)‖₀`, expected `‖x*‖₀ + 1`.
    pub xcheck_l0: usize,
    /// Minimum of `‖x̌ + ĥ‖^p − ‖x̌‖^p`.
    pub augmented_margin_min: f64,
    /// Augmented margin positive while the base margin is not.
    pub implication_failures: usize,
    /// `|ĥ₁|^p < Σ_{i≥2} |ĥᵢ|^p`.
    pub tail_bound_violations: usize,
    /// `|ĥ₂| ≠ 1/t` or `|ĥᵢ| > 1/t` for `i ≥ 3`.
    pub entry_bound_violations: usize,
    /// Samples whose augmented vectors fit in `f64`.
    pub representable: usize,
    /// Worst componentwise residual of `A⁽ᵗ⁾ ĥ(t)` among representable samples.
    pub kernel_residual_max: Option<f64>,
    /// Worst gap between the directly evaluated augmented margin and the
    /// decomposition `base + tail − head`, relative to `head`.
    pub decomposition_gap_max: Option<f64>,
}

/// Other `ℓ0` minimizers `x'` give kernel directions `x' − x*` that random
/// sampling rarely hits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternateAudit {
    pub l0_level: usize,
    pub alternates: usize,
    pub margin_min: Option<f64>,
    pub violations: usize,
    /// Supports of the first few violating alternates.
    pub violating_supports: Vec<Vec<usize>>,
}

pub fn alternate_minimizer_audit(
    a: &DenseMatrix,
    x_star: &[f64],
    p: f64,
    budget: &Budget,
) -> Result<AlternateAudit> {
    check_exponent(p)?;
    let prob = SparseProblem::new(a.clone(), a.mul_vec(x_star)?)?;
    let set = solve_l0(&prob, budget)?;
    let own = super::pnorm::support(x_star);
    let mut margin_min: Option<f64> = None;
    let mut violations = 0;
    let mut violating_supports = Vec::new();
    let mut alternates = 0;
    for sol in set.solutions.iter().filter(|s| s.support != own) {
        alternates += 1;
        let h: Vec<f64> = sol.x.iter().zip(x_star).map(|(u, v)| u - v).collect();
        let m = lp_margin(x_star, &h, p);
        margin_min = Some(margin_min.map_or(m, |c: f64| c.min(m)));
        if !(m > 0.0) {
            violations += 1;
            if violating_supports.len() < 5 {
                violating_supports.push(sol.support.clone());
            }
        }
    }
    Ok(AlternateAudit {
        l0_level: set.level,
        alternates,
        margin_min,
        violations,
        violating_supports,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Report {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub p_check: f64,
    pub p_star_a0: f64,
    pub kernel_samples: usize,
    /// Samples with fewer than two nonzero `lᵢ`.
    pub degenerate: usize,
    pub steps: Vec<TStepReport>,
    pub limit: LimitFactReport,
    pub conclusion: EquivalenceReport,
    pub alternate: AlternateAudit,
}

impl Theorem2Report {
    pub fn chain_consistent(&self) -> bool {
        self.steps.iter().all(|s| {
            s.xcheck_l0 == self.k + 1
                && s.implication_failures == 0
                && s.tail_bound_violations == 0
                && s.entry_bound_violations == 0
                && s.kernel_residual_max.is_none_or(|r| r <= 1e-10)
        })
    }
}

pub(crate) fn check_regime_sparsity(m: usize, k: usize) -> Result<()> {
    if 2 * k < m + 1 || k > m {
        return Err(Error::Precondition(format!(
            "needs (m+1)/2 <= k <= m with m = {m}, got k = {k}"
        )));
    }
    Ok(())
}

/// Lifted quantities for one kernel sample.
struct Lift {
    /// Indices of the B-vectors sorted by decreasing `|lᵢ|`.
    order: Vec<usize>,
    ln_abs_l: Vec<f64>,
    signs: Vec<f64>,
}

fn lift(bvec: &[Vec<f64>], h: &[f64]) -> Option<Lift> {
    let l: Vec<f64> = bvec.iter().map(|b| crate::linalg::dot(b, h)).collect();
    let mut order: Vec<usize> = (0..l.len()).collect();
    order.sort_by(|&i, &j| l[j].abs().total_cmp(&l[i].abs()));
    if is_zero(l[order[0]]) || is_zero(l[order[1]]) {
        return None;
    }
    Some(Lift {
        ln_abs_l: order.iter().map(|&i| l[i].abs().ln()).collect(),
        signs: order.iter().map(|&i| l[i].signum()).collect(),
        order,
    })
}

/// Runs the lifting argument on every sampled `h̄ ∈ N(A)` along `t_schedule`
/// and reports the conclusion margins for `x*`.
pub fn verify_theorem2(
    spec: &VandermondeSpec,
    x_star: &[f64],
    p_check: f64,
    t_schedule: &[f64],
    opts: &HarnessOptions,
) -> Result<Theorem2Report> {
    let (m, n) = (spec.m(), spec.n());
    if n < 2 * m + 2 {
        return Err(Error::Precondition(format!(
            "needs n >= 2m + 2 = {}, got n = {n}",
            2 * m + 2
        )));
    }
    if !spec.distinct_abs() {
        return Err(Error::Precondition(
            "nodes must have distinct absolute values".into(),
        ));
    }
    if x_star.len() != n {
        return Err(Error::Dimension(format!(
            "x has length {} but n = {n}",
            x_star.len()
        )));
    }
    let k = l0(x_star);
    check_regime_sparsity(m, k)?;
    check_exponent(p_check)?;
    let p_star_a0 = gram_spectrum(&build_augmented_0(spec)?)?.p_star;
    if p_check >= p_star_a0 {
        return Err(Error::Precondition(format!(
            "exponent {p_check} is not below p*(A0) = {p_star_a0}"
        )));
    }
    if t_schedule.iter().any(|t| !(*t >= 1.0 && t.is_finite())) {
        return Err(Error::InvalidInput(
            "t schedule entries must be finite and >= 1".into(),
        ));
    }
    let a = build_vandermonde(spec)?;
    let bvec = b_vectors(spec);
    let h_set = sample_null(
        &a,
        opts.trials,
        sub_seed(opts.seed, "theorem2/kernel"),
        &opts.scales,
        None,
        &opts.budget,
    )?;
    let lifts: Vec<Option<Lift>> = h_set.iter().map(|s| lift(&bvec, &s.h)).collect();
    let degenerate = lifts.iter().filter(|l| l.is_none()).count();
    let p = p_check;
    let ln_m1 = ((m + 1) as f64).ln();
    let mut steps = Vec::with_capacity(t_schedule.len());
    for &t in t_schedule {
        let ln_t = t.ln();
        let ln_head = ln_m1 / p - ln_t;
        let mut step = TStepReport {
            t,
            xcheck_l0: k + usize::from(ln_head > ZERO_FLOOR.ln()),
            augmented_margin_min: f64::INFINITY,
            implication_failures: 0,
            tail_bound_violations: 0,
            entry_bound_violations: 0,
            representable: 0,
            kernel_residual_max: None,
            decomposition_gap_max: None,
        };
        for (sample, lifted) in h_set.iter().zip(&lifts) {
            let Some(lf) = lifted else { continue };
            let sc = theorem2_sequences(m, lf.ln_abs_l[0].exp(), lf.ln_abs_l[1].exp(), p, t)?;
            // ln|ĥ_slot|: slot 0 is the x_t row (magnitude `ln_head`), the rest are y_t rows.
            let ln_tail: Vec<f64> = lf.ln_abs_l[1..]
                .iter()
                .map(|ll| ll - lf.ln_abs_l[1] - ln_t)
                .collect();
            if (ln_tail[0] + ln_t).abs() > BOUND_SLACK * ln_t.abs().max(1.0) {
                step.entry_bound_violations += 1;
            }
            step.entry_bound_violations += ln_tail[1..]
                .iter()
                .filter(|v| **v > -ln_t + BOUND_SLACK)
                .count();
            let head_pow = (ln_m1 - p * ln_t).exp();
            let tail_pow: CompensatedSum = ln_tail.iter().map(|v| (p * v).exp()).collect();
            let tail_pow = tail_pow.value();
            if head_pow < tail_pow * (1.0 - BOUND_SLACK) {
                step.tail_bound_violations += 1;
            }
            let base = lp_margin(x_star, &sample.h, p);
            let mut acc = CompensatedSum::default();
            acc.add(base);
            acc.add(tail_pow);
            acc.add(-head_pow);
            let augmented = acc.value();
            step.augmented_margin_min = step.augmented_margin_min.min(augmented);
            if augmented > 0.0 && !(base > 0.0) {
                step.implication_failures += 1;
            }
            if sc.ln_x_t < LN_REPRESENTABLE && ln_head < LN_REPRESENTABLE {
                step.representable += 1;
                let head = ln_head.exp();
                let mut x_check = x_star.to_vec();
                x_check.push(lf.signs[0] * head);
                x_check.extend(std::iter::repeat_n(0.0, m + 1));
                let mut h_hat = sample.h.clone();
                h_hat.push(-lf.signs[0] * head);
                for (slot, ln_v) in ln_tail.iter().enumerate() {
                    h_hat.push(-lf.signs[slot + 1] * ln_v.exp());
                }
                let aug = AugmentedSpec::new(spec.clone(), sc.x_t, sc.y_t)?;
                let at = build_augmented_t_ordered(&aug, &lf.order)?;
                let res = componentwise_residual(&at, &h_hat);
                step.kernel_residual_max =
                    Some(step.kernel_residual_max.map_or(res, |r| r.max(res)));
                let direct = lp_pow_sum(
                    &x_check
                        .iter()
                        .zip(&h_hat)
                        .map(|(u, v)| u + v)
                        .collect::<Vec<_>>(),
                    p,
                ) - lp_pow_sum(&x_check, p);
                let gap = (direct - augmented).abs() / head_pow;
                step.decomposition_gap_max =
                    Some(step.decomposition_gap_max.map_or(gap, |g| g.max(gap)));
            }
        }
        steps.push(step);
    }
    let conclusion = verify_strict_inequality(x_star, &h_set, p, opts.seed)?;
    Ok(Theorem2Report {
        m,
        n,
        k,
        p_check,
        p_star_a0,
        kernel_samples: h_set.len(),
        degenerate,
        steps,
        limit: limit_fact(spec, t_schedule)?,
        conclusion,
        alternate: alternate_minimizer_audit(&a, x_star, p, &opts.budget)?,
    })
}
