//! Vandermonde matrices, their augmented variants, and seeded node sampling.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::rng_for;

/// Largest `m` the sampler accepts; higher powers make the Gram spectra untrustworthy.
pub const MAX_SAMPLED_M: usize = 8;

/// Node vector λ and row count `m` defining `A(m, n, λ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct VandermondeSpec {
    m: usize,
    lambda: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Deserialize)]
struct RawSpec {
    m: usize,
    lambda: Vec<f64>,
    #[serde(default)]
    seed: Option<u64>,
}

impl TryFrom<RawSpec> for VandermondeSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let mut spec = VandermondeSpec::new(raw.m, raw.lambda)?;
        spec.seed = raw.seed;
        Ok(spec)
    }
}

impl VandermondeSpec {
    pub fn new(m: usize, lambda: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Dimension("m must be positive".into()));
        }
        if m > lambda.len() {
            return Err(Error::Dimension(format!(
                "m = {m} exceeds n = {}; the generator must have n >= m",
                lambda.len()
            )));
        }
        if let Some(i) = lambda.iter().position(|&v| v == 0.0 || !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "node {i} is {}; nodes must be nonzero and finite",
                lambda[i]
            )));
        }
        Ok(Self {
            m,
            lambda,
            seed: None,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// True when `|λᵢ| ≠ |λⱼ|` for all `i ≠ j`.
    pub fn distinct_abs(&self) -> bool {
        let mut abs: Vec<f64> = self.lambda.iter().map(|v| v.abs()).collect();
        abs.sort_by(f64::total_cmp);
        abs.windows(2).all(|w| w[0] != w[1])
    }

    /// Smallest gap between sorted absolute node values (∞ for one node).
    pub fn min_abs_separation(&self) -> f64 {
        let mut abs: Vec<f64> = self.lambda.iter().map(|v| v.abs()).collect();
        abs.sort_by(f64::total_cmp);
        abs.windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Scales `x_t`, `y_t` of the augmented family built on a Vandermonde spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentedSpec {
    base: VandermondeSpec,
    x_t: f64,
    y_t: f64,
}

impl AugmentedSpec {
    pub fn new(base: VandermondeSpec, x_t: f64, y_t: f64) -> Result<Self> {
        for (name, v) in [("x_t", x_t), ("y_t", y_t)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { base, x_t, y_t })
    }

    pub fn base(&self) -> &VandermondeSpec {
        &self.base
    }

    pub fn x_t(&self) -> f64 {
        self.x_t
    }

    pub fn y_t(&self) -> f64 {
        self.y_t
    }
}

/// Admissible absolute node range and minimum pairwise separation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeRange {
    pub lo: f64,
    pub hi: f64,
    pub min_sep: f64,
}

impl Default for NodeRange {
    fn default() -> Self {
        Self {
            lo: 0.5,
            hi: 2.0,
            min_sep: 0.05,
        }
    }
}

/// `[λ⁰, λ¹, …, λ^{count-1}]` by repeated multiplication (exact for small integers).
fn powers(lambda: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut acc = 1.0;
    for _ in 0..count {
        out.push(acc);
        acc *= lambda;
    }
    out
}

/// `A(m, n, λ)` with entry `(i, j) = λⱼ^i`.
pub fn build_vandermonde(spec: &VandermondeSpec) -> Result<DenseMatrix> {
    let (m, n) = (spec.m(), spec.n());
    let mut a = DenseMatrix::zeros(m, n)?;
    for (j, &l) in spec.lambda().iter().enumerate() {
        for (i, p) in powers(l, m).into_iter().enumerate() {
            a.set(i, j, p);
        }
    }
    Ok(a)
}

/// `B₁ … B_{m+2}` with `Bᵢ[j] = λⱼ^{m+i-1}`.
pub fn b_vectors(spec: &VandermondeSpec) -> Vec<Vec<f64>> {
    let m = spec.m();
    let pw: Vec<Vec<f64>> = spec
        .lambda()
        .iter()
        .map(|&l| powers(l, 2 * m + 2))
        .collect();
    (0..m + 2)
        .map(|i| pw.iter().map(|p| p[m + i]).collect())
        .collect()
}

fn augmented_shape(spec: &VandermondeSpec) -> Result<(usize, usize)> {
    let (m, n) = (spec.m(), spec.n());
    let rows = m
        .checked_mul(2)
        .and_then(|v| v.checked_add(2))
        .ok_or_else(|| Error::Dimension("2m + 2 overflows".into()))?;
    let cols = n
        .checked_add(m)
        .and_then(|v| v.checked_add(2))
        .ok_or_else(|| Error::Dimension("n + m + 2 overflows".into()))?;
    rows.checked_mul(cols)
        .ok_or_else(|| Error::Dimension("augmented matrix size overflows".into()))?;
    Ok((rows, cols))
}

/// `A⁽ᵗ⁾` with the B-vectors assigned to the scaled rows in the order given.
///
/// `order[0]` selects the B-vector on the `x_t` row (row `m`), `order[1..]`
/// those on the `y_t` rows. The identity order reproduces the plain family.
pub fn build_augmented_t_ordered(aug: &AugmentedSpec, order: &[usize]) -> Result<DenseMatrix> {
    let spec = aug.base();
    let (m, n) = (spec.m(), spec.n());
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..m + 2).collect::<Vec<_>>() {
        return Err(Error::InvalidInput(format!(
            "row order must be a permutation of 0..{}",
            m + 2
        )));
    }
    let (rows, cols) = augmented_shape(spec)?;
    let mut out = DenseMatrix::zeros(rows, cols)?;
    let base = build_vandermonde(spec)?;
    let bvec = b_vectors(spec);
    for i in 0..m {
        for j in 0..n {
            out.set(i, j, base.get(i, j));
        }
    }
    for (slot, &which) in order.iter().enumerate() {
        let scale = if slot == 0 { aug.x_t() } else { aug.y_t() };
        for j in 0..n {
            out.set(m + slot, j, scale * bvec[which][j]);
        }
        out.set(m + slot, n + slot, 1.0);
    }
    Ok(out)
}

/// The `(2m+2) × (m+n+2)` matrix `A⁽ᵗ⁾(m, n, λ, x_t, y_t)`.
pub fn build_augmented_t(aug: &AugmentedSpec) -> Result<DenseMatrix> {
    let order: Vec<usize> = (0..aug.base().m() + 2).collect();
    build_augmented_t_ordered(aug, &order)
}

/// Block-diagonal `A⁽⁰⁾ = diag(A(m, n, λ), I_{m+2})`.
pub fn build_augmented_0(spec: &VandermondeSpec) -> Result<DenseMatrix> {
    let (m, n) = (spec.m(), spec.n());
    let (rows, cols) = augmented_shape(spec)?;
    let mut out = DenseMatrix::zeros(rows, cols)?;
    let base = build_vandermonde(spec)?;
    for i in 0..m {
        for j in 0..n {
            out.set(i, j, base.get(i, j));
        }
    }
    for d in 0..m + 2 {
        out.set(m + d, n + d, 1.0);
    }
    Ok(out)
}

fn draw_abs<R: Rng>(
    rng: &mut R,
    taken: &mut Vec<f64>,
    range: &NodeRange,
    max_attempts: usize,
) -> Result<f64> {
    for _ in 0..max_attempts {
        let v = rng.random_range(range.lo..=range.hi);
        if taken.iter().all(|t| (t - v).abs() >= range.min_sep) {
            taken.push(v);
            return Ok(v);
        }
    }
    Err(Error::Sampling {
        attempts: max_attempts,
        reason: format!(
            "no node in [{}, {}] keeps separation {} from {} existing nodes",
            range.lo,
            range.hi,
            range.min_sep,
            taken.len()
        ),
    })
}

const ATTEMPTS_PER_NODE: usize = 10_000;

/// Random nodes with `|λᵢ| ∈ [lo, hi]`, pairwise absolute separation at least
/// `min_sep`, and random signs; deterministic per seed.
pub fn sample_instance(
    m: usize,
    n: usize,
    seed: u64,
    range: &NodeRange,
) -> Result<VandermondeSpec> {
    if m > MAX_SAMPLED_M {
        return Err(Error::Precondition(format!(
            "m = {m} exceeds the conditioning guard m <= {MAX_SAMPLED_M}"
        )));
    }
    if n <= m {
        return Err(Error::Precondition(format!(
            "need n > m, got m = {m}, n = {n}"
        )));
    }
    let mut rng = rng_for(seed, "sample_instance");
    let mut taken = Vec::with_capacity(n);
    let mut lambda = Vec::with_capacity(n);
    for _ in 0..n {
        let v = draw_abs(&mut rng, &mut taken, range, ATTEMPTS_PER_NODE)?;
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        lambda.push(sign * v);
    }
    Ok(VandermondeSpec::new(m, lambda)?.with_seed(seed))
}

/// Appends nodes `λ_{n+1} … λ_{2m+2}` so the result has `2m + 2` nodes with
/// pairwise-distinct absolute values, each new one separated from all others
/// by at least `range.min_sep`.
pub fn extend_lambda(
    spec: &VandermondeSpec,
    seed: u64,
    range: &NodeRange,
) -> Result<VandermondeSpec> {
    let (m, n) = (spec.m(), spec.n());
    let target = 2 * m + 2;
    if n >= target {
        return Err(Error::Precondition(format!(
            "extension needs n < 2m + 2 = {target}, got n = {n}"
        )));
    }
    if !spec.distinct_abs() {
        return Err(Error::Precondition(
            "base nodes must have distinct absolute values".into(),
        ));
    }
    let mut rng = rng_for(seed, "extend_lambda");
    let mut taken: Vec<f64> = spec.lambda().iter().map(|v| v.abs()).collect();
    let mut lambda = spec.lambda().to_vec();
    for _ in n..target {
        let v = draw_abs(&mut rng, &mut taken, range, ATTEMPTS_PER_NODE)?;
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        lambda.push(sign * v);
    }
    let mut out = VandermondeSpec::new(m, lambda)?;
    out.seed = spec.seed;
    Ok(out)
}
