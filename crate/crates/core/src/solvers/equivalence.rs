use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_for;

use super::check_exponent;
use super::kernel::{KernelClass, KernelSample};
use super::pnorm::lp_margin;

/// At most this many violating perturbations are kept verbatim.
const VIOLATION_DUMP: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginViolation {
    pub index: usize,
    pub class: KernelClass,
    pub scale: f64,
    pub margin: f64,
    pub h: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMargin {
    pub class: KernelClass,
    pub count: usize,
    pub margin_min: f64,
}

/// Outcome of the strict-inequality test at one exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub p: f64,
    /// `min_h ‖x* + h‖_p^p − ‖x*‖_p^p`.
    pub margin_min: f64,
    pub argmin_match: Option<bool>,
    pub trials: usize,
    pub seed: u64,
    pub violation_count: usize,
    pub violations: Vec<MarginViolation>,
    pub by_class: Vec<ClassMargin>,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        self.violation_count == 0 && self.argmin_match != Some(false)
    }
}

/// Margins `‖x* + h‖_p^p − ‖x*‖_p^p` over every sample; nonpositive margins
/// are recorded as violations.
pub fn verify_strict_inequality(
    x_star: &[f64],
    h_set: &[KernelSample],
    p: f64,
    seed: u64,
) -> Result<EquivalenceReport> {
    check_exponent(p)?;
    if h_set.is_empty() {
        return Err(Error::InvalidInput(
            "need at least one kernel sample".into(),
        ));
    }
    let mut margin_min = f64::INFINITY;
    let mut violations = Vec::new();
    let mut violation_count = 0;
    let mut by_class: Vec<ClassMargin> = Vec::new();
    for (index, sample) in h_set.iter().enumerate() {
        if sample.h.len() != x_star.len() {
            return Err(Error::Dimension(format!(
                "kernel sample {index} has length {} but x has length {}",
                sample.h.len(),
                x_star.len()
            )));
        }
        let margin = lp_margin(x_star, &sample.h, p);
        margin_min = margin_min.min(margin);
        match by_class.iter_mut().find(|c| c.class == sample.class) {
            Some(c) => {
                c.count += 1;
                c.margin_min = c.margin_min.min(margin);
            }
            None => by_class.push(ClassMargin {
                class: sample.class,
                count: 1,
                margin_min: margin,
            }),
        }
        if !(margin > 0.0) {
            violation_count += 1;
            if violations.len() < VIOLATION_DUMP {
                violations.push(MarginViolation {
                    index,
                    class: sample.class,
                    scale: sample.scale,
                    margin,
                    h: sample.h.clone(),
                });
            }
        }
    }
    by_class.sort_by_key(|c| c.class);
    Ok(EquivalenceReport {
        p,
        margin_min,
        argmin_match: None,
        trials: h_set.len(),
        seed,
        violation_count,
        violations,
        by_class,
    })
}

/// `k`-sparse vector of length `n` with a uniform random support and
/// coefficients uniform in `±[0.5, 2]`.
pub fn plant_sparse(n: usize, k: usize, seed: u64) -> Result<Vec<f64>> {
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!(
            "cannot plant {k} nonzeros in length {n}"
        )));
    }
    let mut rng = rng_for(seed, "plant_sparse");
    let mut x = vec![0.0; n];
    let mut support = index::sample(&mut rng, n, k).into_vec();
    support.sort_unstable();
    for j in support {
        let v: f64 = rng.random_range(0.5..=2.0);
        x[j] = if rng.random_bool(0.5) { v } else { -v };
    }
    Ok(x)
}
