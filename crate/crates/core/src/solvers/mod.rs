//! Exhaustive ℓ0 and ℓp oracles, kernel machinery, and the theorem harnesses.

mod basic;
mod equivalence;
mod kernel;
mod l0;
mod partition;
pub mod pnorm;
mod theorem1;
mod theorem2;
mod theorem3;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::matrix::DenseMatrix;
use crate::subsets::Budget;

pub use basic::{basic_solutions, lp_argmin, solve_lp_basic, LpBasicResult, COEF_TOL};
pub use equivalence::{
    plant_sparse, verify_strict_inequality, ClassMargin, EquivalenceReport, MarginViolation,
};
pub use kernel::{null_space_basis, sample_null, KernelClass, KernelSample, DEFAULT_SCALES};
pub use l0::{solve_l0, solve_on_support, RESIDUAL_TOL};
pub use partition::{support_partition, SupportPartition};
pub use theorem1::{default_p_grid, verify_theorem1, GridPoint, Theorem1Report};
pub use theorem2::{
    alternate_minimizer_audit, limit_fact, theorem2_sequences, verify_theorem2, AlternateAudit,
    LimitFactReport, LimitStep, TStepReport, Theorem2Report, Theorem2Scales,
};
pub use theorem3::{verify_theorem3, Theorem3Report};

/// `Ax = b` with the right-hand side in the column span of `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseProblem {
    #[serde(rename = "matrix")]
    a: DenseMatrix,
    b: Vec<f64>,
}

impl SparseProblem {
    pub fn new(a: DenseMatrix, b: Vec<f64>) -> Result<Self> {
        if b.len() != a.rows() {
            return Err(Error::Dimension(format!(
                "b has length {} but A has {} rows",
                b.len(),
                a.rows()
            )));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("b must be finite".into()));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn b_norm(&self) -> f64 {
        norm2(&self.b)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            matrix: DenseMatrix,
            b: Vec<f64>,
        }
        let raw: Raw = serde_json::from_str(text)?;
        Self::new(raw.matrix, raw.b)
    }

    /// True when the least-squares residual of `Ax = b` is within tolerance.
    pub fn is_consistent(&self) -> bool {
        let cols: Vec<usize> = (0..self.a.cols()).collect();
        crate::linalg::least_squares(&self.a, &cols, &self.b).is_some_and(|x| {
            let r = self.a.mul_vec(&x).expect("shape checked");
            let res: f64 = r
                .iter()
                .zip(&self.b)
                .map(|(u, v)| (u - v).powi(2))
                .sum::<f64>()
                .sqrt();
            res <= RESIDUAL_TOL * self.b_norm().max(f64::MIN_POSITIVE)
        })
    }
}

/// A solution vector together with its support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseSolution {
    pub support: Vec<usize>,
    pub x: Vec<f64>,
}

/// Every solution at the minimal sparsity level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseSolutionSet {
    pub level: usize,
    pub solutions: Vec<SparseSolution>,
}

/// Knobs shared by the sampling harnesses.
#[derive(Debug, Clone, PartialEq)]
pub struct HarnessOptions {
    /// Kernel directions drawn per instance; each is used at every scale.
    pub trials: usize,
    pub scales: Vec<f64>,
    pub seed: u64,
    pub budget: Budget,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        Self {
            trials: 70,
            scales: DEFAULT_SCALES.to_vec(),
            seed: 0,
            budget: Budget::default(),
        }
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "exponent must lie in (0, 1], got {p}"
        )))
    }
}
