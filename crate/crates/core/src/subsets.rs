//! Lexicographic k-subset enumeration with deterministic parallel reductions.
//!
//! Subsets of `{0, .., n-1}` are visited in lexicographic order and split into
//! fixed-size rank chunks. Each chunk is scanned sequentially; chunk results
//! are combined in rank order, so every reduction here returns the same value
//! (and the same lexicographically-smallest witness on ties) whether the
//! chunks ran on one thread or many.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Environment variable that overrides the default enumeration cap.
pub const BUDGET_ENV: &str = "LP_EQUIV_BUDGET";

/// Default cap on the number of subsets one enumeration may visit.
pub const DEFAULT_MAX_SUBSETS: u64 = 1_000_000;

const CHUNK: u64 = 512;

/// Enumeration cap shared by every exhaustive operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_subsets: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_subsets: DEFAULT_MAX_SUBSETS,
        }
    }
}

impl Budget {
    pub fn new(max_subsets: u64) -> Self {
        Self { max_subsets }
    }

    /// Default budget, overridden by `LP_EQUIV_BUDGET` when it parses.
    pub fn from_env() -> Self {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(Self::new)
            .unwrap_or_default()
    }

    /// Errors unless `needed` subsets fit under the cap.
    pub fn check(&self, needed: u128) -> Result<u64> {
        if needed > u128::from(self.max_subsets) {
            Err(Error::BudgetExceeded {
                needed,
                cap: self.max_subsets,
            })
        } else {
            Ok(needed as u64)
        }
    }
}

/// Execution strategy for the chunked scans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Advances `comb` to its lexicographic successor; false once exhausted.
pub fn next_combination(comb: &mut [usize], n: usize) -> bool {
    let k = comb.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] < n - k + i {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// The `rank`-th k-subset of `{0..n-1}` in lexicographic order.
pub fn unrank(n: usize, k: usize, mut rank: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let remaining = k - slot;
        loop {
            let count = binomial(n - next - 1, remaining - 1);
            if rank < count {
                break;
            }
            rank -= count;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

/// Lexicographic rank of a sorted k-subset; inverse of [`unrank`].
pub fn rank(n: usize, comb: &[usize]) -> u128 {
    let k = comb.len();
    let mut r = 0;
    let mut prev = 0;
    for (slot, &c) in comb.iter().enumerate() {
        for skipped in prev..c {
            r += binomial(n - skipped - 1, k - slot - 1);
        }
        prev = c + 1;
    }
    r
}

/// Iterator over k-subsets in lexicographic order.
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        let current = (k <= n).then(|| (0..k).collect());
        Self { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let mut succ = out.clone();
        self.current = next_combination(&mut succ, self.n).then_some(succ);
        Some(out)
    }
}

/// Runs `scan` over every rank chunk and returns the chunk results in rank order.
fn chunked<R, F>(exec: Exec, n: usize, k: usize, scan: F) -> Vec<R>
where
    R: Send,
    F: Fn(&mut Vec<usize>, u64) -> R + Sync,
{
    let total = binomial(n, k) as u64;
    let chunks = total.div_ceil(CHUNK);
    let run = |c: u64| {
        let start = c * CHUNK;
        let len = CHUNK.min(total - start);
        let mut comb = unrank(n, k, u128::from(start));
        scan(&mut comb, len)
    };
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => (0..chunks).into_par_iter().map(run).collect(),
        _ => (0..chunks).map(run).collect(),
    }
}

/// Lexicographically first k-subset satisfying `pred`.
pub fn find_first<F>(exec: Exec, n: usize, k: usize, pred: F) -> Option<Vec<usize>>
where
    F: Fn(&[usize]) -> bool + Sync,
{
    let total = binomial(n, k) as u64;
    let chunks = total.div_ceil(CHUNK);
    let scan = |c: u64| -> Option<Vec<usize>> {
        let start = c * CHUNK;
        let len = CHUNK.min(total - start);
        let mut comb = unrank(n, k, u128::from(start));
        for i in 0..len {
            if pred(&comb) {
                return Some(comb);
            }
            if i + 1 < len {
                next_combination(&mut comb, n);
            }
        }
        None
    };
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => (0..chunks).into_par_iter().find_map_first(scan),
        _ => (0..chunks).find_map(scan),
    }
}

/// Applies `f` to every k-subset and keeps the `Some` results in lexicographic order.
pub fn filter_map<T, F>(exec: Exec, n: usize, k: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[usize]) -> Option<T> + Sync,
{
    chunked(exec, n, k, |comb, len| {
        let mut out = Vec::new();
        for i in 0..len {
            if let Some(v) = f(comb) {
                out.push(v);
            }
            if i + 1 < len {
                next_combination(comb, n);
            }
        }
        out
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Minimum and maximum of a per-subset pair of scores.
#[derive(Debug, Clone, PartialEq)]
pub struct Extremes {
    pub min: f64,
    pub argmin: Vec<usize>,
    pub max: f64,
    pub argmax: Vec<usize>,
}

impl Extremes {
    fn merge(self, other: Extremes) -> Extremes {
        // `self` always precedes `other` in rank order, so strict comparisons
        // keep the lexicographically smallest witness.
        let (min, argmin) = if other.min < self.min {
            (other.min, other.argmin)
        } else {
            (self.min, self.argmin)
        };
        let (max, argmax) = if other.max > self.max {
            (other.max, other.argmax)
        } else {
            (self.max, self.argmax)
        };
        Extremes {
            min,
            argmin,
            max,
            argmax,
        }
    }
}

/// Extremes of `score` over all k-subsets; `score` returns `(low, high)` and
/// the minimum is taken over `low`, the maximum over `high`.
pub fn extremes<F>(exec: Exec, n: usize, k: usize, score: F) -> Result<Option<Extremes>>
where
    F: Fn(&[usize]) -> Result<(f64, f64)> + Sync,
{
    let parts = chunked(exec, n, k, |comb, len| -> Result<Option<Extremes>> {
        let mut best: Option<Extremes> = None;
        for i in 0..len {
            let (lo, hi) = score(comb)?;
            let here = Extremes {
                min: lo,
                argmin: comb.clone(),
                max: hi,
                argmax: comb.clone(),
            };
            best = Some(match best {
                None => here,
                Some(b) => b.merge(here),
            });
            if i + 1 < len {
                next_combination(comb, n);
            }
        }
        Ok(best)
    });
    let mut acc: Option<Extremes> = None;
    for part in parts {
        if let Some(e) = part? {
            acc = Some(match acc {
                None => e,
                Some(a) => a.merge(e),
            });
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(10, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424);
    }

    #[test]
    fn iterator_is_lexicographic_and_complete() {
        let all: Vec<_> = Combinations::new(5, 3).collect();
        assert_eq!(all.len(), 10);
        assert_eq!(all[0], vec![0, 1, 2]);
        assert_eq!(all[9], vec![2, 3, 4]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(
            Combinations::new(3, 0).collect::<Vec<_>>(),
            vec![Vec::<usize>::new()]
        );
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }

    #[test]
    fn budget_refuses_rather_than_sampling() {
        let b = Budget::new(100);
        assert!(b.check(100).is_ok());
        assert!(matches!(b.check(101), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let score = |s: &[usize]| -> Result<(f64, f64)> {
            let v = s.iter().map(|&i| ((i * 7919) % 13) as f64).sum::<f64>();
            Ok((v, v))
        };
        let a = extremes(Exec::Sequential, 16, 5, score).unwrap();
        let b = extremes(Exec::Parallel, 16, 5, score).unwrap();
        assert_eq!(a, b);
        let pred = |s: &[usize]| s.iter().sum::<usize>() == 40;
        assert_eq!(
            find_first(Exec::Sequential, 16, 5, pred),
            find_first(Exec::Parallel, 16, 5, pred)
        );
        let f = |s: &[usize]| (s[0] % 3 == 0).then(|| s.to_vec());
        assert_eq!(
            filter_map(Exec::Sequential, 14, 4, f),
            filter_map(Exec::Parallel, 14, 4, f)
        );
    }

    #[test]
    fn extremes_prefer_lexicographically_smallest_witness() {
        let e = extremes(Exec::Parallel, 12, 3, |_| Ok((1.0, 1.0)))
            .unwrap()
            .unwrap();
        assert_eq!(e.argmin, vec![0, 1, 2]);
        assert_eq!(e.argmax, vec![0, 1, 2]);
    }

    proptest! {
        #[test]
        fn unrank_inverts_rank(n in 1usize..20, kf in 0.0f64..1.0, rf in 0.0f64..1.0) {
            let k = ((n as f64) * kf) as usize;
            let total = binomial(n, k);
            let r = ((total as f64 - 1.0) * rf) as u128;
            let c = unrank(n, k, r);
            prop_assert_eq!(c.len(), k);
            prop_assert!(c.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(rank(n, &c), r);
        }

        #[test]
        fn find_first_matches_linear_scan(n in 1usize..14, k in 1usize..5, m in 2usize..9) {
            prop_assume!(k <= n);
            let pred = |s: &[usize]| s.iter().sum::<usize>() % m == 1;
            let expected = Combinations::new(n, k).find(|s| pred(s));
            prop_assert_eq!(find_first(Exec::Parallel, n, k, pred), expected);
        }
    }
}
