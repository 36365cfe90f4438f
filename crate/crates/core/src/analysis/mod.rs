//! Audits of the scalar lemmas, the cross-term bound and the intermediate
//! inequalities behind the threshold theorem.

mod chain;
mod cross;
mod scalar;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use chain::{audit_theorem1_chain, holder_check, ChainAudit, ChainStep};
pub use cross::{cross_term_check, CrossTermReport};
pub use scalar::{
    c_pq, f_derivative_check, f_lemma3, f_log_derivative, lemma2_check, lemma3_check, ln_c_pq,
    ln_f_lemma3, ln_phi_bound, p_star_identity_check, p_star_inequality_solve, phi_bound,
    phi_check,
};

/// Default number of grid points for scalar checks.
pub const GRID_POINTS: usize = 1000;
/// Lower end of the default exponent grid.
pub const GRID_LO: f64 = 1e-6;

/// Evaluations of a scalar claim on a grid; `violation` is signed so that
/// positive values break the claim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarCheckReport {
    pub name: String,
    pub claim: String,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub worst_violation: f64,
    pub worst_at: f64,
    pub tol: f64,
    pub pass: bool,
}

impl ScalarCheckReport {
    pub(crate) fn from_violations(
        name: &str,
        claim: &str,
        grid: Vec<f64>,
        values: Vec<f64>,
        violations: &[f64],
        tol: f64,
    ) -> Result<Self> {
        if grid.is_empty() || grid.len() != values.len() || grid.len() != violations.len() {
            return Err(Error::InvalidInput(format!(
                "{name}: grid must be nonempty and aligned"
            )));
        }
        let (i, worst) =
            violations
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, v)| {
                    if v > best.1 {
                        (i, v)
                    } else {
                        best
                    }
                });
        Ok(Self {
            name: name.into(),
            claim: claim.into(),
            worst_at: grid[i],
            grid,
            values,
            worst_violation: worst,
            tol,
            pass: worst <= tol,
        })
    }

    /// `grid,value` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,value\n");
        for (x, v) in self.grid.iter().zip(&self.values) {
            out.push_str(&format!("{x:e},{v:e}\n"));
        }
        out
    }
}

/// `count` log-spaced points from `lo` to `hi`, both included.
pub fn log_grid(count: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if count < 2 || !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "log grid needs count >= 2 and 0 < lo < hi, got {count}, {lo}, {hi}"
        )));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (count - 1) as f64;
    let mut g: Vec<f64> = (0..count).map(|i| (a + step * i as f64).exp()).collect();
    g[0] = lo;
    g[count - 1] = hi;
    Ok(g)
}

/// The default exponent grid: 1000 log-spaced points on `[1e-6, 1]`.
pub fn default_grid() -> Vec<f64> {
    log_grid(GRID_POINTS, GRID_LO, 1.0).expect("valid constants")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_and_spacing() {
        let g = default_grid();
        assert_eq!(g.len(), 1000);
        assert_eq!((g[0], g[999]), (1e-6, 1.0));
        let r0 = g[1] / g[0];
        assert!(g
            .windows(2)
            .all(|w| ((w[1] / w[0]) / r0 - 1.0).abs() < 1e-9));
    }

    #[test]
    fn report_picks_worst_point() {
        let r = ScalarCheckReport::from_violations(
            "t",
            "c",
            vec![1.0, 2.0],
            vec![0.0, 0.0],
            &[-1.0, 0.5],
            0.0,
        )
        .unwrap();
        assert_eq!((r.worst_at, r.worst_violation, r.pass), (2.0, 0.5, false));
    }
}
