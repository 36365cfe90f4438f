use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{equilibrate_rows, normalized, null_space, smallest_right_singular_vector};
use crate::matrix::DenseMatrix;
use crate::rng::rng_for;
use crate::spark::{compute_spark, SparkCertificate};
use crate::subsets::Budget;

pub const DEFAULT_SCALES: [f64; 3] = [1e-3, 1.0, 1e3];

const MIN_SUPPORT_ATTEMPTS: usize = 32;

/// Orthonormal basis of `N(A)` at the matrix's own relative tolerance.
pub fn null_space_basis(a: &DenseMatrix) -> Vec<Vec<f64>> {
    null_space(a, a.tol())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelClass {
    /// Gaussian direction in the kernel.
    Direction,
    /// Sum of basis vectors with random signs.
    Combination,
    /// Kernel vector supported on a spark-sized column set.
    MinimalSupport,
}

impl KernelClass {
    pub fn name(self) -> &'static str {
        match self {
            KernelClass::Direction => "direction",
            KernelClass::Combination => "combination",
            KernelClass::MinimalSupport => "minimal_support",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub h: Vec<f64>,
    pub class: KernelClass,
    pub scale: f64,
}

fn combine(basis: &[Vec<f64>], coef: &[f64]) -> Vec<f64> {
    let mut h = vec![0.0; basis[0].len()];
    for (v, c) in basis.iter().zip(coef) {
        for (hi, vi) in h.iter_mut().zip(v) {
            *hi += c * vi;
        }
    }
    h
}

fn minimal_support_vector<R: Rng>(
    a: &DenseMatrix,
    eq: &DenseMatrix,
    cert: &SparkCertificate,
    rng: &mut R,
) -> Option<Vec<f64>> {
    let n = a.cols();
    let from_set = |set: &[usize]| -> Option<Vec<f64>> {
        if !crate::linalg::columns_dependent(eq, set, cert.tol) {
            return None;
        }
        let local = smallest_right_singular_vector(&eq.select_columns(set));
        let max = local.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if local.iter().any(|v| v.abs() <= 1e-9 * max) {
            return None;
        }
        let mut h = vec![0.0; n];
        for (&j, &v) in set.iter().zip(&local) {
            h[j] = v;
        }
        normalized(&h)
    };
    for _ in 0..MIN_SUPPORT_ATTEMPTS {
        let mut set = index::sample(rng, n, cert.spark).into_vec();
        set.sort_unstable();
        if let Some(h) = from_set(&set) {
            return Some(h);
        }
    }
    from_set(&cert.witness)
}

/// Deterministic kernel vectors for probing strict-inequality claims.
///
/// Sample `i` belongs to class `i mod 3` (direction, combination, minimal
/// support); each unit vector is emitted once per entry of `scales`, so the
/// result has `count · scales.len()` entries. The minimal-support class needs
/// a spark certificate; it is computed when not supplied, and the class falls
/// back to directions when that exceeds the budget.
pub fn sample_null(
    a: &DenseMatrix,
    count: usize,
    seed: u64,
    scales: &[f64],
    spark: Option<&SparkCertificate>,
    budget: &Budget,
) -> Result<Vec<KernelSample>> {
    if scales.is_empty() || scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::InvalidInput(
            "scales must be positive and finite".into(),
        ));
    }
    let basis = null_space_basis(a);
    if basis.is_empty() {
        return Err(Error::TrivialKernel);
    }
    let computed;
    let cert = match spark {
        Some(c) => Some(c),
        None => match compute_spark(a, budget) {
            Ok(c) => {
                computed = c;
                Some(&computed)
            }
            Err(Error::BudgetExceeded { .. }) => None,
            Err(e) => return Err(e),
        },
    };
    let eq = equilibrate_rows(a);
    let mut rng = rng_for(seed, "sample_null");
    let d = basis.len();
    let mut out = Vec::with_capacity(count * scales.len());
    for i in 0..count {
        let wanted = [
            KernelClass::Direction,
            KernelClass::Combination,
            KernelClass::MinimalSupport,
        ][i % 3];
        let (class, h) = match wanted {
            KernelClass::Combination => {
                let coef: Vec<f64> = (0..d)
                    .map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 })
                    .collect();
                (wanted, combine(&basis, &coef))
            }
            KernelClass::MinimalSupport => {
                match cert.and_then(|c| minimal_support_vector(a, &eq, c, &mut rng)) {
                    Some(h) => (wanted, h),
                    None => {
                        let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                        (KernelClass::Direction, combine(&basis, &g))
                    }
                }
            }
            KernelClass::Direction => {
                let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                (wanted, combine(&basis, &g))
            }
        };
        let h = normalized(&h).ok_or(Error::TrivialKernel)?;
        for &s in scales {
            out.push(KernelSample {
                h: h.iter().map(|v| v * s).collect(),
                class,
                scale: s,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;
    use crate::matgen::{build_vandermonde, sample_instance, NodeRange};
    use crate::solvers::pnorm::l0;

    #[test]
    fn kernel_of_row_of_ones() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let b = null_space_basis(&a);
        assert_eq!(b.len(), 1);
        assert!((b[0][0] + b[0][1]).abs() < 1e-15);
    }

    #[test]
    fn vandermonde_kernel_dimension() {
        for (m, n) in [(2, 5), (3, 7), (4, 6)] {
            let s = sample_instance(m, n, 3, &NodeRange::default()).unwrap();
            let a = build_vandermonde(&s).unwrap();
            let basis = null_space_basis(&a);
            assert_eq!(basis.len(), n - m);
            for h in &basis {
                let r = a.mul_vec(h).unwrap();
                assert!(norm2(&r) <= 1e-10 * a.max_abs() * n as f64);
            }
        }
    }

    #[test]
    fn sample_counts_classes_and_residuals() {
        let s = sample_instance(3, 7, 11, &NodeRange::default()).unwrap();
        let a = build_vandermonde(&s).unwrap();
        let out = sample_null(&a, 10, 5, &DEFAULT_SCALES, None, &Budget::default()).unwrap();
        assert_eq!(out.len(), 30);
        for k in &out {
            let r = norm2(&a.mul_vec(&k.h).unwrap());
            assert!(r <= 1e-9 * a.max_abs() * norm2(&k.h), "residual {r}");
        }
        let minimal: Vec<_> = out
            .iter()
            .filter(|k| k.class == KernelClass::MinimalSupport)
            .collect();
        assert!(!minimal.is_empty());
        assert!(minimal.iter().all(|k| l0(&k.h) == 4));
        let again = sample_null(&a, 10, 5, &DEFAULT_SCALES, None, &Budget::default()).unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn trivial_kernel_is_an_error() {
        let a = DenseMatrix::identity(3).unwrap();
        assert!(matches!(
            sample_null(&a, 3, 0, &[1.0], None, &Budget::default()),
            Err(Error::TrivialKernel)
        ));
    }
}
