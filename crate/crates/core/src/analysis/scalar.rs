use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::rng_for;
use crate::spectral::{p_star_from_extremes, SQRT2_PLUS_1_SQ};

use super::ScalarCheckReport;

const FRAC_SQRT2_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn check_unit_interval(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "p must lie in (0, 1], got {p}"
        )))
    }
}

/// `ln C_{p,q}(k, s, t)`.
pub fn ln_c_pq(k: usize, s: usize, t: usize, p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && p < q && q.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "needs 0 < p < q, got p = {p}, q = {q}"
        )));
    }
    if k == 0 || s == 0 || t == 0 {
        return Err(Error::InvalidInput("k, s, t must be positive".into()));
    }
    let r = p / q;
    let first = r * (t as f64).ln() - (s as f64).ln();
    let second = r * r.ln() + (1.0 - r) * (-r).ln_1p() + (r - 1.0) * (k as f64).ln();
    Ok(first.max(second) / p)
}

/// `max{t^{p/q}/s, (p/q)^{p/q} (1−p/q)^{1−p/q} k^{p/q−1}}^{1/p}`.
pub fn c_pq(k: usize, s: usize, t: usize, p: f64, q: f64) -> Result<f64> {
    Ok(ln_c_pq(k, s, t, p, q)?.exp())
}

/// `ln f(p) = ½ ln(p/2) − (½ − 1/p) ln(2 − p)`.
pub fn ln_f_lemma3(p: f64) -> Result<f64> {
    check_unit_interval(p)?;
    Ok(0.5 * (p / 2.0).ln() - (0.5 - 1.0 / p) * (2.0 - p).ln())
}

/// `(p/2)^{1/2} (1/(2−p))^{1/2 − 1/p}`; overflows to infinity for tiny `p`.
pub fn f_lemma3(p: f64) -> Result<f64> {
    Ok(ln_f_lemma3(p)?.exp())
}

/// Closed form of `f′/f = −ln(2 − p)/p²`.
pub fn f_log_derivative(p: f64) -> Result<f64> {
    check_unit_interval(p)?;
    Ok(-(2.0 - p).ln() / (p * p))
}

/// `ln φ(p) = (1/p − 1/2) ln(1 − p/2)`.
pub fn ln_phi_bound(p: f64) -> Result<f64> {
    check_unit_interval(p)?;
    Ok((1.0 / p - 0.5) * (-p / 2.0).ln_1p())
}

/// `φ(p) = (1 − p/2)^{1/p − 1/2}`.
pub fn phi_bound(p: f64) -> Result<f64> {
    Ok(ln_phi_bound(p)?.exp())
}

/// Solves `((√2+1)/2) · ((λ₊ − λ₋)/λ₋) · (√2/2) · √(p/2) < 1` for the
/// supremum `p`, capped at 1.
pub fn p_star_inequality_solve(lambda_min_plus: f64, lambda_max: f64) -> Result<f64> {
    if !(lambda_min_plus > 0.0 && lambda_max.is_finite()) || lambda_max < lambda_min_plus {
        return Err(Error::InvalidInput(format!(
            "needs 0 < λmin+ <= λmax, got {lambda_min_plus} and {lambda_max}"
        )));
    }
    let c = (SQRT2_PLUS_1_SQ.sqrt() / 2.0)
        * ((lambda_max - lambda_min_plus) / lambda_min_plus)
        * FRAC_SQRT2_2;
    if c == 0.0 {
        return Ok(1.0);
    }
    // c √(p/2) < 1  ⇔  p < 2 / c².
    Ok((2.0 / (c * c)).min(1.0))
}

/// Lemma 2 on random nonincreasing sequences; the value is `lhs / rhs`.
pub fn lemma2_check(trials: usize, seed: u64, tol: f64) -> Result<ScalarCheckReport> {
    let mut rng = rng_for(seed, "lemma2");
    let (mut grid, mut values, mut viol) = (Vec::new(), Vec::new(), Vec::new());
    for trial in 0..trials {
        let p: f64 = rng.random_range(0.05..=1.0);
        let q: f64 = p + rng.random_range(0.05..=2.0);
        let k = rng.random_range(1..=6usize);
        let t = rng.random_range(1..=12usize);
        let s = rng.random_range(k..=k + t);
        let len = s.max(k + t);
        let mut u: Vec<f64> = match trial % 3 {
            0 => (0..len).map(|_| rng.random_range(0.0..1.0)).collect(),
            1 => {
                let r: f64 = rng.random_range(0.05..1.0);
                (0..len).map(|i| r.powi(i as i32)).collect()
            }
            _ => {
                // Flat head followed by zeros.
                let cut = rng.random_range(1..=len);
                (0..len).map(|i| if i < cut { 1.0 } else { 0.0 }).collect()
            }
        };
        u.sort_by(|a, b| b.total_cmp(a));
        let lhs = u[k..k + t]
            .iter()
            .map(|v| v.powf(q))
            .sum::<f64>()
            .powf(1.0 / q);
        let head = u[..s].iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p);
        let rhs = c_pq(k, s, t, p, q)? * head;
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        grid.push(p);
        values.push(ratio);
        viol.push(ratio - 1.0);
    }
    ScalarCheckReport::from_violations(
        "lemma2",
        "tail q-norm <= C_{p,q}(k,s,t) * head p-norm",
        grid,
        values,
        &viol,
        tol,
    )
}

/// `f(p) ≥ √2/2` on `grid`.
pub fn lemma3_check(grid: &[f64], tol: f64) -> Result<ScalarCheckReport> {
    let mut values = Vec::with_capacity(grid.len());
    let mut viol = Vec::with_capacity(grid.len());
    for &p in grid {
        let f = f_lemma3(p)?;
        values.push(f);
        viol.push(FRAC_SQRT2_2 - f);
    }
    ScalarCheckReport::from_violations(
        "lemma3",
        "f(p) >= sqrt(2)/2",
        grid.to_vec(),
        values,
        &viol,
        tol,
    )
}

/// Central differences of `ln f` against the closed-form log-derivative,
/// plus its sign. The value is the relative discrepancy.
pub fn f_derivative_check(grid: &[f64], tol: f64) -> Result<ScalarCheckReport> {
    let mut values = Vec::with_capacity(grid.len());
    let mut viol = Vec::with_capacity(grid.len());
    for &p in grid {
        let h = 1e-5 * p;
        let hi = (p + h).min(1.0);
        let lo = p - h;
        let fd = (ln_f_lemma3(hi)? - ln_f_lemma3(lo)?) / (hi - lo);
        let exact = f_log_derivative(p)?;
        let rel = (fd - exact).abs() / exact.abs().max(f64::MIN_POSITIVE);
        values.push(exact);
        // A positive derivative is a violation in its own right.
        viol.push(if exact > 0.0 { f64::INFINITY } else { rel });
    }
    ScalarCheckReport::from_violations(
        "lemma3_derivative",
        "d ln f/dp = -ln(2-p)/p^2 <= 0",
        grid.to_vec(),
        values,
        &viol,
        tol,
    )
}

/// `φ(p) ≤ √2/2` on `grid` together with monotonicity between neighbours.
pub fn phi_check(grid: &[f64], tol: f64) -> Result<ScalarCheckReport> {
    let values: Vec<f64> = grid.iter().map(|&p| phi_bound(p)).collect::<Result<_>>()?;
    let mut viol: Vec<f64> = values.iter().map(|v| v - FRAC_SQRT2_2).collect();
    for i in 1..values.len() {
        if grid[i] > grid[i - 1] {
            viol[i] = viol[i].max(values[i - 1] - values[i]);
        }
    }
    ScalarCheckReport::from_violations(
        "phi",
        "phi(p) <= sqrt(2)/2 and nondecreasing",
        grid.to_vec(),
        values,
        &viol,
        tol,
    )
}

/// Both threshold routes on random eigenvalue pairs; the value is the
/// relative difference.
pub fn p_star_identity_check(trials: usize, seed: u64, tol: f64) -> Result<ScalarCheckReport> {
    let mut rng = rng_for(seed, "p_star_identity");
    let (mut grid, mut values) = (Vec::new(), Vec::new());
    for _ in 0..trials {
        let lo: f64 = 10f64.powf(rng.random_range(-6.0..3.0));
        let hi = lo * 10f64.powf(rng.random_range(0.0..6.0));
        let a = p_star_inequality_solve(lo, hi)?;
        let b = p_star_from_extremes(lo, hi);
        grid.push(hi / lo);
        values.push((a - b).abs() / b);
    }
    let viol = values.clone();
    ScalarCheckReport::from_violations(
        "p_star_identity",
        "inequality solution equals the closed-form threshold",
        grid,
        values,
        &viol,
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::default_grid;

    #[test]
    fn c_pq_by_substitution() {
        assert!((c_pq(1, 1, 1, 1.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(c_pq(1, 1, 1, 2.0, 2.0).is_err());
    }

    #[test]
    fn c_pq_reduces_to_second_arm() {
        for k in [1usize, 2, 5] {
            for p in [0.1, 0.5, 0.9, 1.0] {
                let c = c_pq(k, 4 * k, 4 * k, p, 2.0).unwrap();
                let second = (p / 2.0).sqrt()
                    * (2.0 - p).powf(1.0 / p - 0.5)
                    * (2.0 * k as f64).powf(0.5 - 1.0 / p);
                assert!((c / second - 1.0).abs() < 1e-12, "k = {k}, p = {p}");
            }
        }
    }

    #[test]
    fn lemma2_on_random_sequences() {
        let r = lemma2_check(2000, 1, 1e-10).unwrap();
        assert!(r.pass, "worst {} at p = {}", r.worst_violation, r.worst_at);
    }

    #[test]
    fn f_at_one_and_domain() {
        assert!((f_lemma3(1.0).unwrap() - FRAC_SQRT2_2).abs() < 1e-15);
        assert!(f_lemma3(0.0).is_err() && f_lemma3(1.2).is_err());
        assert_eq!(f_lemma3(1e-6).unwrap(), f64::INFINITY);
    }

    #[test]
    fn f_log_derivative_matches_differences() {
        let g: Vec<f64> = default_grid()
            .into_iter()
            .filter(|p| *p >= 1e-3 && *p < 1.0)
            .collect();
        let r = f_derivative_check(&g, 1e-6).unwrap();
        assert!(r.pass, "worst {} at {}", r.worst_violation, r.worst_at);
    }

    #[test]
    fn phi_limits() {
        assert!((phi_bound(1.0).unwrap() - FRAC_SQRT2_2).abs() < 1e-15);
        assert!((phi_bound(1e-6).unwrap() - (-0.5f64).exp()).abs() < 1e-4);
        assert!(phi_check(&default_grid(), 1e-12).unwrap().pass);
    }

    #[test]
    fn lemma3_on_default_grid() {
        assert!(lemma3_check(&default_grid(), 1e-12).unwrap().pass);
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(p_star_inequality_solve(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(p_star_inequality_solve(1.0, 2.0).unwrap(), 1.0);
        let disc = 265f64.sqrt();
        let (lo, hi) = ((17.0 - disc) / 2.0, (17.0 + disc) / 2.0);
        let p = p_star_inequality_solve(lo, hi).unwrap();
        assert!((p / 1.35e-3 - 1.0).abs() < 1e-2);
        assert!(p_star_inequality_solve(0.0, 1.0).is_err());
        assert!(p_star_inequality_solve(2.0, 1.0).is_err());
    }

    #[test]
    fn threshold_routes_agree() {
        let r = p_star_identity_check(1000, 3, 1e-12).unwrap();
        assert!(r.pass, "worst {}", r.worst_violation);
    }
}
