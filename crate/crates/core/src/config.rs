//! Run configuration in a flat `key = value` text format.
//!
//! ```text
//! # comments start with '#'
//! seed = 42
//! m = 3
//! n = 8
//! p_grid = auto            # or a comma-separated list
//! t_schedule = 10, 100, 1000, 10000
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::matgen::MAX_SAMPLED_M;
use crate::matrix::DEFAULT_TOL;
use crate::spark::SPARK_RANK_TOL;
use crate::subsets::{Budget, BUDGET_ENV, DEFAULT_MAX_SUBSETS};

#[derive(Debug, Clone, PartialEq)]
pub enum PGrid {
    /// Per-instance grid around `p*(A)`.
    Auto,
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub m: usize,
    pub n: usize,
    /// Random instances per harness.
    pub instances: usize,
    pub p_grid: PGrid,
    /// Kernel directions per instance; each is used at all three scales.
    pub trials: usize,
    /// Samples for the sequence and vector audits.
    pub lemma_trials: usize,
    pub t_schedule: Vec<f64>,
    pub max_subsets: u64,
    pub eig_tol: f64,
    pub rank_tol: f64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            m: 3,
            n: 8,
            instances: 3,
            p_grid: PGrid::Auto,
            trials: 70,
            lemma_trials: 1000,
            t_schedule: vec![10.0, 100.0, 1000.0, 10000.0],
            max_subsets: DEFAULT_MAX_SUBSETS,
            eig_tol: DEFAULT_TOL,
            rank_tol: SPARK_RANK_TOL,
            output_dir: PathBuf::from("lp-equiv-out"),
        }
    }
}

const KEYS: [&str; 12] = [
    "seed",
    "m",
    "n",
    "instances",
    "p_grid",
    "trials",
    "lemma_trials",
    "t_schedule",
    "max_subsets",
    "eig_tol",
    "rank_tol",
    "output_dir",
];

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse()
        .map_err(|e| parse_err(line, format!("{key}: cannot parse {v:?}: {e}")))
}

fn parse_list(line: usize, key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',')
        .map(|s| parse_num::<f64>(line, key, s.trim()))
        .collect()
}

fn join(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:?}"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| parse_err(line, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(parse_err(line, format!("unknown key {key:?}")));
            }
            if seen.contains(&key) {
                return Err(parse_err(line, format!("duplicate key {key:?}")));
            }
            seen.push(key);
            match key {
                "seed" => cfg.seed = parse_num(line, key, value)?,
                "m" => cfg.m = parse_num(line, key, value)?,
                "n" => cfg.n = parse_num(line, key, value)?,
                "instances" => cfg.instances = parse_num(line, key, value)?,
                "p_grid" => {
                    cfg.p_grid = if value == "auto" {
                        PGrid::Auto
                    } else {
                        PGrid::List(parse_list(line, key, value)?)
                    }
                }
                "trials" => cfg.trials = parse_num(line, key, value)?,
                "lemma_trials" => cfg.lemma_trials = parse_num(line, key, value)?,
                "t_schedule" => cfg.t_schedule = parse_list(line, key, value)?,
                "max_subsets" => cfg.max_subsets = parse_num(line, key, value)?,
                "eig_tol" => cfg.eig_tol = parse_num(line, key, value)?,
                "rank_tol" => cfg.rank_tol = parse_num(line, key, value)?,
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                _ => unreachable!("key list checked above"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Every key, one per line, in a form [`RunConfig::parse`] reads back exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let grid = match &self.p_grid {
            PGrid::Auto => "auto".to_string(),
            PGrid::List(v) => join(v),
        };
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "m = {}", self.m);
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "instances = {}", self.instances);
        let _ = writeln!(s, "p_grid = {grid}");
        let _ = writeln!(s, "trials = {}", self.trials);
        let _ = writeln!(s, "lemma_trials = {}", self.lemma_trials);
        let _ = writeln!(s, "t_schedule = {}", join(&self.t_schedule));
        let _ = writeln!(s, "max_subsets = {}", self.max_subsets);
        let _ = writeln!(s, "eig_tol = {:?}", self.eig_tol);
        let _ = writeln!(s, "rank_tol = {:?}", self.rank_tol);
        let _ = writeln!(s, "output_dir = {}", self.output_dir.display());
        s
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.m == 0 || self.m > MAX_SAMPLED_M {
            return bad(format!("m must lie in 1..={MAX_SAMPLED_M}, got {}", self.m));
        }
        if self.n <= self.m {
            return bad(format!(
                "n must exceed m, got m = {}, n = {}",
                self.m, self.n
            ));
        }
        if self.instances == 0
            || self.trials == 0
            || self.lemma_trials == 0
            || self.max_subsets == 0
        {
            return bad("instances, trials, lemma_trials and max_subsets must be positive".into());
        }
        if let PGrid::List(v) = &self.p_grid {
            if v.is_empty() || v.iter().any(|p| !(*p > 0.0 && *p <= 1.0)) {
                return bad("p_grid entries must lie in (0, 1]".into());
            }
        }
        if self.t_schedule.is_empty()
            || self
                .t_schedule
                .iter()
                .any(|t| !(*t >= 1.0 && t.is_finite()))
        {
            return bad("t_schedule entries must be finite and at least 1".into());
        }
        for (name, v) in [("eig_tol", self.eig_tol), ("rank_tol", self.rank_tol)] {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("{name} must lie in (0, 1), got {v}"));
            }
        }
        if self.output_dir.as_os_str().is_empty() {
            return bad("output_dir must be nonempty".into());
        }
        Ok(())
    }

    /// The configured cap, unless `LP_EQUIV_BUDGET` holds a valid override.
    pub fn budget(&self) -> Budget {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(Budget::new)
            .unwrap_or(Budget::new(self.max_subsets))
    }
}
