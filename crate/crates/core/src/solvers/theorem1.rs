use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::sub_seed;
use crate::spark::compute_spark;
use crate::spectral::{gram_spectrum, SpectralSummary};

use super::basic::{basic_solutions, lp_argmin};
use super::equivalence::{plant_sparse, verify_strict_inequality, EquivalenceReport};
use super::kernel::sample_null;
use super::l0::solve_l0;
use super::pnorm::support;
use super::{HarnessOptions, SparseProblem};

/// `{p*/8, p*/4, p*/2, 0.9p*, p*, 1.1p*, 0.5, 1}` restricted to `(0, 1]`,
/// sorted and deduplicated.
pub fn default_p_grid(p_star: f64) -> Vec<f64> {
    let mut g: Vec<f64> = [
        p_star / 8.0,
        p_star / 4.0,
        p_star / 2.0,
        0.9 * p_star,
        p_star,
        1.1 * p_star,
        0.5,
        1.0,
    ]
    .into_iter()
    .filter(|p| *p > 0.0 && *p <= 1.0)
    .collect();
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub p: f64,
    /// `p < p*(A)`, the range in which the claim applies.
    pub below_threshold: bool,
    /// Supports of the basic-solution `ℓp` minimizers.
    pub lp_argmin_supports: Vec<Vec<usize>>,
    pub report: EquivalenceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub rows: usize,
    pub cols: usize,
    pub k: usize,
    pub spark: usize,
    pub spectral: SpectralSummary,
    pub seed: u64,
    pub x_star: Vec<f64>,
    pub l0_level: usize,
    pub l0_supports: Vec<Vec<usize>>,
    /// The planted support is among the `ℓ0` minimizers and the level is at most `k`.
    pub recovered: bool,
    pub kernel_samples: usize,
    pub grid: Vec<GridPoint>,
    /// No grid exponent lies strictly below `p*(A)`.
    pub grid_empty_below_threshold: bool,
    pub violations_below_threshold: usize,
    pub argmin_mismatches_below_threshold: usize,
}

impl Theorem1Report {
    /// The claim held at every grid exponent below the threshold.
    pub fn holds(&self) -> bool {
        self.recovered
            && self.violations_below_threshold == 0
            && self.argmin_mismatches_below_threshold == 0
    }
}

/// Plants a `k`-sparse `x*` with `b = A x*` and audits the strict inequality
/// and the `ℓp`/`ℓ0` argmin agreement over the exponent grid.
pub fn verify_theorem1(
    a: &DenseMatrix,
    k: usize,
    p_grid: Option<&[f64]>,
    opts: &HarnessOptions,
) -> Result<Theorem1Report> {
    let cert = compute_spark(a, &opts.budget)?;
    if 2 * k >= cert.spark || k == 0 {
        return Err(Error::Precondition(format!(
            "needs 0 < k < spark/2 = {}/2, got k = {k}",
            cert.spark
        )));
    }
    let spectral = gram_spectrum(a)?;
    let grid = match p_grid {
        Some(g) => {
            for &p in g {
                super::check_exponent(p)?;
            }
            g.to_vec()
        }
        None => default_p_grid(spectral.p_star),
    };
    let x_star = plant_sparse(a.cols(), k, sub_seed(opts.seed, "theorem1/plant"))?;
    let b = a.mul_vec(&x_star)?;
    let prob = SparseProblem::new(a.clone(), b)?;
    let l0 = solve_l0(&prob, &opts.budget)?;
    let planted = support(&x_star);
    let l0_supports: Vec<Vec<usize>> = l0.solutions.iter().map(|s| s.support.clone()).collect();
    let recovered = l0.level <= k && l0_supports.contains(&planted);
    let h_set = sample_null(
        a,
        opts.trials,
        sub_seed(opts.seed, "theorem1/kernel"),
        &opts.scales,
        Some(&cert),
        &opts.budget,
    )?;
    let basics = basic_solutions(&prob, &opts.budget)?;
    let mut points = Vec::with_capacity(grid.len());
    for &p in &grid {
        let mut report = verify_strict_inequality(&x_star, &h_set, p, opts.seed)?;
        let lp = lp_argmin(&basics, p)?;
        let lp_argmin_supports: Vec<Vec<usize>> =
            lp.minimizers.iter().map(|s| s.support.clone()).collect();
        report.argmin_match = Some(lp_argmin_supports.iter().all(|s| l0_supports.contains(s)));
        points.push(GridPoint {
            p,
            below_threshold: p < spectral.p_star,
            lp_argmin_supports,
            report,
        });
    }
    let below: Vec<&GridPoint> = points.iter().filter(|g| g.below_threshold).collect();
    Ok(Theorem1Report {
        rows: a.rows(),
        cols: a.cols(),
        k,
        spark: cert.spark,
        seed: opts.seed,
        x_star,
        l0_level: l0.level,
        l0_supports,
        recovered,
        kernel_samples: h_set.len(),
        grid_empty_below_threshold: below.is_empty(),
        violations_below_threshold: below.iter().map(|g| g.report.violation_count).sum(),
        argmin_mismatches_below_threshold: below
            .iter()
            .filter(|g| g.report.argmin_match == Some(false))
            .count(),
        grid: points,
        spectral,
    })
}
