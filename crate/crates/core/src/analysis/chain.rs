use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{componentwise_residual, dot, norm2};
use crate::matrix::DenseMatrix;
use crate::rng::rng_for;
use crate::solvers::pnorm::{l0, ln_lp_norm};
use crate::solvers::{support_partition, SupportPartition};
use crate::spectral::{gram_spectrum, SQRT2_PLUS_1_SQ};

use super::scalar::ln_c_pq;
use super::ScalarCheckReport;

/// Relative slack for the non-strict steps.
const STEP_TOL: f64 = 1e-12;

/// One inequality `lhs ≤ rhs` (or `<` when strict), held in logs so tiny
/// exponents neither overflow nor underflow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub name: String,
    pub ln_lhs: f64,
    pub ln_rhs: f64,
    /// `ln rhs − ln lhs`; negative means the step fails.
    pub log_slack: f64,
    pub strict: bool,
    pub holds: bool,
}

impl ChainStep {
    fn new(name: &str, ln_lhs: f64, ln_rhs: f64, strict: bool) -> Self {
        let log_slack = if ln_lhs == f64::NEG_INFINITY && ln_rhs == f64::NEG_INFINITY {
            // 0 ≤ 0
            if strict {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        } else {
            ln_rhs - ln_lhs
        };
        let holds = if strict {
            log_slack > 0.0
        } else {
            log_slack >= -STEP_TOL
        };
        Self {
            name: name.into(),
            ln_lhs,
            ln_rhs,
            log_slack,
            strict,
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainAudit {
    pub p: f64,
    pub k: usize,
    pub p_star: f64,
    pub below_threshold: bool,
    /// `((√2+1)/2) ((λ₊−λ₋)/λ₋) (√2/2) √(p/2)`, below 1 exactly when `p < p*`.
    pub final_coefficient: f64,
    pub partition: SupportPartition,
    pub steps: Vec<ChainStep>,
    pub first_failure: Option<String>,
}

impl ChainAudit {
    pub fn step(&self, name: &str) -> Option<&ChainStep> {
        self.steps.iter().find(|s| s.name == name)
    }

    pub fn all_hold(&self) -> bool {
        self.first_failure.is_none()
    }
}

fn ln0(v: f64) -> f64 {
    if v > 0.0 {
        v.ln()
    } else {
        f64::NEG_INFINITY
    }
}

fn restrict(h: &[f64], idx: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; h.len()];
    for &i in idx {
        out[i] = h[i];
    }
    out
}

fn gather(h: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| h[i]).collect()
}

/// Evaluates both sides of every intermediate inequality in the proof that
/// kernel perturbations increase `‖x*‖_p^p` below the threshold.
pub fn audit_theorem1_chain(
    a: &DenseMatrix,
    x_star: &[f64],
    h: &[f64],
    p: f64,
) -> Result<ChainAudit> {
    let n = a.cols();
    if x_star.len() != n || h.len() != n {
        return Err(Error::Dimension(format!(
            "x and h must have length {n}, got {} and {}",
            x_star.len(),
            h.len()
        )));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "p must lie in (0, 1], got {p}"
        )));
    }
    if norm2(h) == 0.0 {
        return Err(Error::InvalidInput("h must be nonzero".into()));
    }
    let res = componentwise_residual(a, h);
    if res > 1e-8 {
        return Err(Error::InvalidInput(format!(
            "h is not in N(A): relative residual {res:e}"
        )));
    }
    let k = l0(x_star);
    let part = support_partition(x_star, h, k)?;
    let spec = gram_spectrum(a)?;
    let (lmin, lmax) = (spec.lambda_min_plus, spec.lambda_max);
    let ln_ratio = ln0((lmax - lmin) / lmin);

    let h0 = restrict(h, &part.s0);
    let empty = Vec::new();
    let s1 = part.blocks.first().unwrap_or(&empty);
    let h1 = restrict(h, s1);
    let (n0, n1) = (norm2(&h0), norm2(&h1));
    let h01: Vec<f64> = h0.iter().zip(&h1).map(|(u, v)| u + v).collect();
    let tail: Vec<Vec<f64>> = part.blocks.iter().skip(1).map(|b| restrict(h, b)).collect();
    let tail_sum: f64 = tail.iter().map(|v| norm2(v)).sum();
    let ln_comp_p = ln_lp_norm(&gather(h, &part.complement()), p);
    let ln_s0_p = ln_lp_norm(&gather(h, &part.s0), p);
    let kf = k as f64;

    let mut steps = Vec::new();

    let ah0 = a.mul_vec(&h0)?;
    let ah1 = a.mul_vec(&h1)?;
    let ah01 = a.mul_vec(&h01)?;
    steps.push(ChainStep::new(
        "gram_lower",
        ln0(n0 * n0 + n1 * n1),
        ln0(dot(&ah01, &ah01) / lmin),
        false,
    ));
    let mut cross = 0.0;
    for t in &tail {
        let at = a.mul_vec(t)?;
        cross -= dot(&ah0, &at) + dot(&ah1, &at);
    }
    let ln_e1_rhs = ln0((lmax - lmin) / (2.0 * lmin)) + ln0(n0 + n1) + ln0(tail_sum);
    steps.push(ChainStep::new(
        "cross_terms",
        ln0(cross / lmin),
        ln_e1_rhs,
        false,
    ));
    steps.push(ChainStep::new(
        "energy",
        ln0(n0 * n0 + n1 * n1),
        ln_e1_rhs,
        false,
    ));

    // Groups of four consecutive blocks starting at S₂, and their one-block-earlier shadows.
    let blocks = &part.blocks;
    let group = |start: usize| -> Vec<usize> {
        blocks
            .iter()
            .skip(start)
            .take(4)
            .flatten()
            .copied()
            .collect()
    };
    let n_groups = blocks.len().saturating_sub(1).div_ceil(4);
    let group_sum: f64 = (0..n_groups)
        .map(|j| norm2(&gather(h, &group(4 * j + 1))))
        .sum();
    steps.push(ChainStep::new(
        "block_sum",
        ln0(tail_sum),
        ln0(2.0 * group_sum),
        false,
    ));

    let ln_c = ln_c_pq(k, 4 * k, 4 * k, p, 2.0)?;
    let mut worst = ChainStep::new("lemma2_blocks", f64::NEG_INFINITY, f64::NEG_INFINITY, false);
    for j in 0..n_groups {
        let lhs = ln0(norm2(&gather(h, &group(4 * j + 1))));
        let rhs = ln_c + ln_lp_norm(&gather(h, &group(4 * j)), p);
        let s = ChainStep::new("lemma2_blocks", lhs, rhs, false);
        if s.log_slack < worst.log_slack {
            worst = s;
        }
    }
    steps.push(worst);

    let ln_first_arm = (0.5 - 1.0 / p) * (4.0 * kf).ln();
    let ln_c_arm =
        0.5 * (p / 2.0).ln() + (1.0 / p - 0.5) * (2.0 - p).ln() + (0.5 - 1.0 / p) * (2.0 * kf).ln();
    steps.push(ChainStep::new("c_arm", ln_first_arm, ln_c_arm, false));
    steps.push(ChainStep::new(
        "tail_lp",
        ln0(tail_sum),
        2f64.ln() + ln_c_arm + ln_comp_p,
        false,
    ));

    let ln_b = ln_ratio + ln_c_arm + ln_comp_p;
    steps.push(ChainStep::new(
        "energy_lp",
        ln0(n0 * n0 + n1 * n1),
        ln_b + ln0(n0 + n1),
        false,
    ));
    let circle = if ln_b == f64::NEG_INFINITY {
        if n0 == 0.0 && n1 == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        let (u, v) = ((ln0(n0) - ln_b).exp(), (ln0(n1) - ln_b).exp());
        (u - 0.5).powi(2) + (v - 0.5).powi(2)
    };
    steps.push(ChainStep::new("circle", ln0(circle), 0.5f64.ln(), false));
    let ln_half_sqrt2p1 = 0.5 * SQRT2_PLUS_1_SQ.ln() - 2f64.ln();
    steps.push(ChainStep::new(
        "s0_bound",
        ln0(n0),
        ln_half_sqrt2p1 + ln_b,
        false,
    ));
    steps.push(ChainStep::new(
        "holder",
        ln_s0_p,
        (1.0 / p - 0.5) * kf.ln() + ln0(n0),
        false,
    ));
    let ln_coef = ln_half_sqrt2p1 + ln_ratio - 0.5 * 2f64.ln() + 0.5 * (p / 2.0).ln();
    steps.push(ChainStep::new("s0_lp", ln_s0_p, ln_coef + ln_comp_p, false));
    steps.push(ChainStep::new("conclusion", ln_s0_p, ln_comp_p, true));

    let first_failure = steps.iter().find(|s| !s.holds).map(|s| s.name.clone());
    Ok(ChainAudit {
        p,
        k,
        p_star: spec.p_star,
        below_threshold: p < spec.p_star,
        final_coefficient: ln_coef.exp(),
        partition: part,
        steps,
        first_failure,
    })
}

/// `‖x‖_p^p ≤ ‖x‖₀^{1−p/2} ‖x‖₂^p` on random sparse vectors; the value is
/// `ln lhs − ln rhs`.
pub fn holder_check(trials: usize, seed: u64, tol: f64) -> Result<ScalarCheckReport> {
    let mut rng = rng_for(seed, "holder");
    let (mut grid, mut values) = (Vec::new(), Vec::new());
    for _ in 0..trials {
        let n = rng.random_range(1..=20usize);
        let p: f64 = rng.random_range(0.01..=1.0);
        let mut x: Vec<f64> = (0..n)
            .map(|_| {
                if rng.random_bool(0.6) {
                    rng.sample(StandardNormal)
                } else {
                    0.0
                }
            })
            .collect();
        if l0(&x) == 0 {
            x[0] = 1.0;
        }
        let lhs = p * ln_lp_norm(&x, p);
        let rhs = (1.0 - p / 2.0) * (l0(&x) as f64).ln() + p * norm2(&x).ln();
        grid.push(p);
        values.push(lhs - rhs);
    }
    let viol = values.clone();
    ScalarCheckReport::from_violations(
        "holder",
        "||x||_p^p <= ||x||_0^(1-p/2) ||x||_2^p",
        grid,
        values,
        &viol,
        tol,
    )
}
