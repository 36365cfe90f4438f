//! `‖x‖_p^p` for tiny `p`, evaluated as `exp(p ln|x|)` with compensated sums.

/// Magnitudes at or below this are treated as exact zeros.
pub const ZERO_FLOOR: f64 = 1e-300;

/// Neumaier's compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        iter.into_iter().for_each(|v| s.add(v));
        s
    }
}

pub fn is_zero(v: f64) -> bool {
    v.abs() <= ZERO_FLOOR
}

/// `|x|^p`, zero below [`ZERO_FLOOR`].
pub fn abs_pow(x: f64, p: f64) -> f64 {
    if is_zero(x) {
        0.0
    } else {
        (p * x.abs().ln()).exp()
    }
}

pub fn lp_pow_sum(x: &[f64], p: f64) -> f64 {
    x.iter()
        .map(|&v| abs_pow(v, p))
        .collect::<CompensatedSum>()
        .value()
}

/// `ln ‖x‖_p = (1/p) ln Σ|xᵢ|^p`; `-∞` for the zero vector.
pub fn ln_lp_norm(x: &[f64], p: f64) -> f64 {
    let s = lp_pow_sum(x, p);
    if s == 0.0 {
        f64::NEG_INFINITY
    } else {
        s.ln() / p
    }
}

pub fn support(x: &[f64]) -> Vec<usize> {
    (0..x.len()).filter(|&i| !is_zero(x[i])).collect()
}

pub fn l0(x: &[f64]) -> usize {
    x.iter().filter(|v| !is_zero(**v)).count()
}

/// `|x + h|^p − |x|^p` without cancellation when `h` is small relative to `x`.
pub fn coordinate_margin(x: f64, h: f64, p: f64) -> f64 {
    if is_zero(x) {
        return abs_pow(h, p);
    }
    let sum = x + h;
    if is_zero(sum) {
        return -abs_pow(x, p);
    }
    let r = h / x;
    let ln_ratio = if r > -1.0 { r.ln_1p() } else { (-1.0 - r).ln() };
    abs_pow(x, p) * (p * ln_ratio).exp_m1()
}

/// `‖x + h‖_p^p − ‖x‖_p^p`, accumulated per coordinate with compensation.
pub fn lp_margin(x: &[f64], h: &[f64], p: f64) -> f64 {
    debug_assert_eq!(x.len(), h.len());
    x.iter()
        .zip(h)
        .map(|(&a, &d)| coordinate_margin(a, d, p))
        .collect::<CompensatedSum>()
        .value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s: CompensatedSum = [1.0, 1e-16, -1.0, 1e-16].into_iter().collect();
        assert_eq!(s.value(), 2e-16);
    }

    #[test]
    fn tiny_exponent_counts_nonzeros() {
        let x = [0.0, 2.0, -0.5, 1e-301];
        assert!((lp_pow_sum(&x, 1e-9) - 2.0).abs() < 1e-8);
        assert_eq!(l0(&x), 2);
        assert_eq!(support(&x), vec![1, 2]);
    }

    #[test]
    fn margin_matches_direct_difference() {
        let x = [1.5, 0.0, -2.0, 0.7];
        let h = [0.3, -0.2, 2.0, -0.7];
        for p in [1.0, 0.5, 0.1] {
            let direct = lp_pow_sum(&[1.8, -0.2, 0.0, 0.0], p) - lp_pow_sum(&x, p);
            assert!((lp_margin(&x, &h, p) - direct).abs() < 1e-13, "p = {p}");
        }
    }

    #[test]
    fn margin_of_small_perturbation_is_accurate() {
        // d/dε |1 + ε|^p = p at ε = 0.
        let m = coordinate_margin(1.0, 1e-12, 0.25);
        assert!((m - 0.25e-12).abs() < 1e-24);
        let m = coordinate_margin(-3.0, 6.0, 1.0);
        assert!((m - 0.0).abs() < 1e-15);
    }
}
