use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::componentwise_residual;
use crate::matgen::{
    build_augmented_0, build_vandermonde, extend_lambda, NodeRange, VandermondeSpec,
};
use crate::rng::sub_seed;
use crate::spectral::gram_spectrum;

use super::equivalence::{verify_strict_inequality, EquivalenceReport};
use super::kernel::sample_null;
use super::pnorm::{l0, lp_margin};
use super::theorem2::{alternate_minimizer_audit, check_regime_sparsity, AlternateAudit};
use super::{check_exponent, HarnessOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem3Report {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub p_check: f64,
    pub extended_lambda: Vec<f64>,
    /// `p*(A⁽⁰⁾(m, n, λ*))`.
    pub p_star_a0: f64,
    pub kernel_samples: usize,
    /// Worst componentwise residual of `A(m, n, λ*) h̃`.
    pub embedding_residual_max: f64,
    /// Worst componentwise residual of `A⁽⁰⁾(m, n, λ*)` on the zero-padded `h̃`.
    pub augmented_residual_max: f64,
    /// Worst difference between embedded and original margins.
    pub embedding_margin_gap_max: f64,
    pub conclusion: EquivalenceReport,
    pub alternate: AlternateAudit,
}

impl Theorem3Report {
    pub fn embedding_consistent(&self) -> bool {
        self.embedding_residual_max <= 1e-10
            && self.augmented_residual_max <= 1e-10
            && self.embedding_margin_gap_max == 0.0
    }
}

/// Extends the nodes to `λ* ∈ R^{2m+2}`, embeds `x*` and every sampled
/// `h ∈ N(A(m, n, λ))` by zero padding, and audits the margins at `p_check`.
///
/// `p_check` defaults to half of `p*(A⁽⁰⁾(m, n, λ*))`.
pub fn verify_theorem3(
    spec: &VandermondeSpec,
    x_star: &[f64],
    p_check: Option<f64>,
    opts: &HarnessOptions,
) -> Result<Theorem3Report> {
    let (m, n) = (spec.m(), spec.n());
    if !(m < n && n < 2 * m + 2) {
        return Err(Error::Precondition(format!(
            "needs m < n < 2m + 2, got m = {m}, n = {n}"
        )));
    }
    if x_star.len() != n {
        return Err(Error::Dimension(format!(
            "x has length {} but n = {n}",
            x_star.len()
        )));
    }
    let k = l0(x_star);
    check_regime_sparsity(m, k)?;
    let star = extend_lambda(
        spec,
        sub_seed(opts.seed, "theorem3/extend"),
        &NodeRange::default(),
    )?;
    let a_star = build_vandermonde(&star)?;
    let a0_star = build_augmented_0(&star)?;
    let p_star_a0 = gram_spectrum(&a0_star)?.p_star;
    let p = p_check.unwrap_or(p_star_a0 / 2.0);
    check_exponent(p)?;
    if p >= p_star_a0 {
        return Err(Error::Precondition(format!(
            "exponent {p} is not below p*(A0(λ*)) = {p_star_a0}"
        )));
    }
    let a = build_vandermonde(spec)?;
    let h_set = sample_null(
        &a,
        opts.trials,
        sub_seed(opts.seed, "theorem3/kernel"),
        &opts.scales,
        None,
        &opts.budget,
    )?;
    let n_star = star.n();
    let mut x_tilde = x_star.to_vec();
    x_tilde.resize(n_star, 0.0);
    let mut embedding_residual_max = 0.0_f64;
    let mut augmented_residual_max = 0.0_f64;
    let mut embedding_margin_gap_max = 0.0_f64;
    for sample in &h_set {
        let mut h_tilde = sample.h.clone();
        h_tilde.resize(n_star, 0.0);
        embedding_residual_max =
            embedding_residual_max.max(componentwise_residual(&a_star, &h_tilde));
        let mut h_aug = h_tilde.clone();
        h_aug.resize(a0_star.cols(), 0.0);
        augmented_residual_max =
            augmented_residual_max.max(componentwise_residual(&a0_star, &h_aug));
        let gap = (lp_margin(&x_tilde, &h_tilde, p) - lp_margin(x_star, &sample.h, p)).abs();
        embedding_margin_gap_max = embedding_margin_gap_max.max(gap);
    }
    Ok(Theorem3Report {
        m,
        n,
        k,
        p_check: p,
        extended_lambda: star.lambda().to_vec(),
        p_star_a0,
        kernel_samples: h_set.len(),
        embedding_residual_max,
        augmented_residual_max,
        embedding_margin_gap_max,
        conclusion: verify_strict_inequality(x_star, &h_set, p, opts.seed)?,
        alternate: alternate_minimizer_audit(&a, x_star, p, &opts.budget)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgen::sample_instance;
    use crate::solvers::plant_sparse;

    #[test]
    fn embedding_preserves_kernel_and_margins() {
        let s = sample_instance(3, 6, 5, &NodeRange::default()).unwrap();
        let x = plant_sparse(6, 2, 5).unwrap();
        let opts = HarnessOptions {
            trials: 15,
            seed: 3,
            ..HarnessOptions::default()
        };
        let r = verify_theorem3(&s, &x, None, &opts).unwrap();
        assert_eq!(r.extended_lambda.len(), 8);
        assert_eq!(&r.extended_lambda[..6], s.lambda());
        assert!(r.embedding_consistent(), "{r:?}");
        assert!((r.p_check - r.p_star_a0 / 2.0).abs() == 0.0);
    }

    #[test]
    fn regime_is_checked() {
        let s = sample_instance(2, 6, 5, &NodeRange::default()).unwrap();
        let x = plant_sparse(6, 2, 5).unwrap();
        assert!(matches!(
            verify_theorem3(&s, &x, None, &HarnessOptions::default()),
            Err(Error::Precondition(_))
        ));
    }
}
