use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lp_equiv::analysis::{
    audit_theorem1_chain, cross_term_check, default_grid, f_derivative_check, lemma2_check,
    lemma3_check, phi_check, ScalarCheckReport,
};
use lp_equiv::config::{PGrid, RunConfig};
use lp_equiv::matgen::{build_vandermonde, sample_instance, NodeRange, VandermondeSpec};
use lp_equiv::rng::sub_seed;
use lp_equiv::solvers::{
    plant_sparse, sample_null, solve_l0, solve_lp_basic, verify_theorem1, verify_theorem2,
    verify_theorem3, EquivalenceReport, HarnessOptions, SparseProblem, DEFAULT_SCALES,
};
use lp_equiv::spark::compute_spark_with_tol;
use lp_equiv::spectral::{gram_spectrum, restricted_extremes};
use lp_equiv::suite::{run_suite, write_atomic};
use lp_equiv::DenseMatrix;

#[derive(Parser)]
#[command(
    name = "lp-equiv",
    version,
    about = "l0/lp equivalence toolkit for Vandermonde systems"
)]
struct Cli {
    /// Run configuration file (flat `key = value`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; results go to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Lemma {
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    Phi,
    Bu,
    Chain,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a Vandermonde instance, optionally with a planted k-sparse solution.
    Gen {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Exact spark with a lexicographically smallest witness.
    Spark {
        #[arg(long)]
        input: PathBuf,
    },
    /// Nonzero Gram spectrum extremes and the threshold p*(A).
    Pstar {
        #[arg(long)]
        input: PathBuf,
    },
    /// Extremes of the k-restricted Gram spectrum.
    RestrictedSpec {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Every sparsest solution of Ax = b.
    SolveL0 {
        #[arg(long)]
        input: PathBuf,
    },
    /// Global lp minimizers over basic solutions.
    SolveLp {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        p: f64,
    },
    /// Scalar and inequality audits.
    Audit {
        #[arg(long, value_enum)]
        lemma: Lemma,
        /// Matrix or instance file, required for `bu` and `chain`.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Threshold harness for k < spark/2.
    VerifyThm1 {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        /// Comma-separated exponents; defaults to a grid around p*(A).
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
    },
    /// Augmentation harness for n >= 2m + 2.
    VerifyThm2 {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Embedding harness for m < n < 2m + 2.
    VerifyThm3 {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
    },
    /// Full pipeline with manifest and CSV tables.
    Suite,
}

/// Contents of an input file: a bare matrix, a bare spec, or a `gen` output.
struct Input {
    spec: Option<VandermondeSpec>,
    matrix: DenseMatrix,
    x_star: Option<Vec<f64>>,
    b: Option<Vec<f64>>,
}

fn field<T: serde::de::DeserializeOwned>(v: &Value, key: &str) -> Result<Option<T>> {
    Ok(v.get(key)
        .cloned()
        .map(serde_json::from_value)
        .transpose()?)
}

fn read_input(path: &Path) -> Result<Input> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if !text.trim_start().starts_with('{') {
        return Ok(Input {
            spec: None,
            matrix: DenseMatrix::read_path(path)?,
            x_star: None,
            b: None,
        });
    }
    let v: Value = serde_json::from_str(&text)?;
    let spec: Option<VandermondeSpec> = if v.get("lambda").is_some() {
        Some(serde_json::from_value(v.clone())?)
    } else {
        field(&v, "spec")?
    };
    let matrix = match (field(&v, "matrix")?, &spec) {
        (Some(m), _) => m,
        (None, Some(s)) => build_vandermonde(s)?,
        (None, None) if v.get("rows").is_some() => serde_json::from_value(v.clone())?,
        (None, None) => bail!("{} holds neither a matrix nor a spec", path.display()),
    };
    Ok(Input {
        spec,
        matrix,
        x_star: field(&v, "x_star")?,
        b: field(&v, "b")?,
    })
}

fn need_spec(input: &Input) -> Result<&VandermondeSpec> {
    input
        .spec
        .as_ref()
        .context("this command needs a Vandermonde spec (a `gen` output or {\"m\", \"lambda\"})")
}

struct Sink {
    out: Option<PathBuf>,
    format: Format,
}

impl Sink {
    /// Prints or writes `name.json` / `name.csv`.
    fn emit(&self, name: &str, value: &Value, csv: Option<String>) -> Result<()> {
        let (ext, body) = match (self.format, csv) {
            (Format::Csv, Some(c)) => ("csv", c),
            (Format::Csv, None) => bail!("`{name}` has no CSV form; use --format json"),
            (Format::Json, _) => ("json", serde_json::to_string_pretty(value)? + "\n"),
        };
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                let path = write_atomic(dir, &format!("{name}.{ext}"), &body)?;
                eprintln!("wrote {}", path.display());
            }
            None => print!("{body}"),
        }
        Ok(())
    }
}

fn margins_csv(rows: &[(usize, &EquivalenceReport)]) -> String {
    let mut out = String::from("instance,p,class,count,margin_min\n");
    for (i, r) in rows {
        for c in &r.by_class {
            out += &format!(
                "{i},{:e},{},{},{:e}\n",
                r.p,
                c.class.name(),
                c.count,
                c.margin_min
            );
        }
    }
    out
}

fn scalar(sink: &Sink, name: &str, r: &ScalarCheckReport) -> Result<()> {
    sink.emit(name, &serde_json::to_value(r)?, Some(r.to_csv()))
}

fn harness_opts(cfg: &RunConfig, label: &str) -> HarnessOptions {
    HarnessOptions {
        trials: cfg.trials,
        scales: DEFAULT_SCALES.to_vec(),
        seed: sub_seed(cfg.seed, label),
        budget: cfg.budget(),
    }
}

/// Planted vector from the input file, or a fresh k-sparse one.
fn planted(input: &Input, k: Option<usize>, cfg: &RunConfig, label: &str) -> Result<Vec<f64>> {
    match (k, &input.x_star) {
        (Some(k), _) => Ok(plant_sparse(
            input.matrix.cols(),
            k,
            sub_seed(cfg.seed, label),
        )?),
        (None, Some(x)) => Ok(x.clone()),
        (None, None) => bail!("pass --k or an input with `x_star`"),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let budget = cfg.budget();
    let sink = Sink {
        out: cli.out.clone(),
        format: cli.format,
    };
    match cli.command {
        Command::Gen { m, n, k } => {
            let (m, n) = (m.unwrap_or(cfg.m), n.unwrap_or(cfg.n));
            let spec = sample_instance(m, n, cfg.seed, &NodeRange::default())?;
            let a = build_vandermonde(&spec)?;
            let mut v = json!({ "spec": spec, "matrix": a });
            if let Some(k) = k {
                let x = plant_sparse(n, k, sub_seed(cfg.seed, "gen/plant"))?;
                v["b"] = json!(a.mul_vec(&x)?);
                v["x_star"] = json!(x);
            }
            sink.emit("instance", &v, Some(a.to_csv()))?;
        }
        Command::Spark { input } => {
            let a = read_input(&input)?.matrix;
            let c = compute_spark_with_tol(&a, cfg.rank_tol, &budget)?;
            let csv = format!(
                "spark,witness,tol\n{},{},{:e}\n",
                c.spark,
                c.witness
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(" "),
                c.tol
            );
            sink.emit("spark", &serde_json::to_value(&c)?, Some(csv))?;
        }
        Command::Pstar { input } => {
            let s = gram_spectrum(&read_input(&input)?.matrix)?;
            let csv = format!(
                "lambda_min_plus,lambda_max,rank,p_star\n{:e},{:e},{},{:e}\n",
                s.lambda_min_plus, s.lambda_max, s.rank, s.p_star
            );
            sink.emit("pstar", &serde_json::to_value(&s)?, Some(csv))?;
        }
        Command::RestrictedSpec { input, k } => {
            let r = restricted_extremes(&read_input(&input)?.matrix, k, &budget)?;
            let csv = format!(
                "k,min_eig,max_eig\n{},{:e},{:e}\n",
                r.k, r.min_eig, r.max_eig
            );
            sink.emit("restricted_spec", &serde_json::to_value(&r)?, Some(csv))?;
        }
        Command::SolveL0 { input } | Command::SolveLp { input, .. }
            if read_input(&input)?.b.is_none() =>
        {
            bail!("{} has no right-hand side `b`", input.display())
        }
        Command::SolveL0 { input } => {
            let inp = read_input(&input)?;
            let prob = SparseProblem::new(inp.matrix, inp.b.unwrap_or_default())?;
            let s = solve_l0(&prob, &budget)?;
            let mut csv = String::from("level,support\n");
            for sol in &s.solutions {
                csv += &format!("{},{}\n", s.level, join(&sol.support));
            }
            sink.emit("l0", &serde_json::to_value(&s)?, Some(csv))?;
        }
        Command::SolveLp { input, p } => {
            let inp = read_input(&input)?;
            let prob = SparseProblem::new(inp.matrix, inp.b.unwrap_or_default())?;
            let r = solve_lp_basic(&prob, p, &budget)?;
            let mut csv = String::from("p,value,support\n");
            for sol in &r.minimizers {
                csv += &format!("{:e},{:e},{}\n", r.p, r.value, join(&sol.support));
            }
            sink.emit("lp", &serde_json::to_value(&r)?, Some(csv))?;
        }
        Command::Audit { lemma, input, p } => match lemma {
            Lemma::Two => scalar(
                &sink,
                "lemma2",
                &lemma2_check(cfg.lemma_trials, sub_seed(cfg.seed, "lemma2"), 1e-10)?,
            )?,
            Lemma::Three => {
                let grid = default_grid();
                let r = lemma3_check(&grid, 1e-12)?;
                let d = f_derivative_check(&grid[..grid.len() - 1], 1e-6)?;
                let v = json!({ "lemma3": r, "derivative": d });
                sink.emit("lemma3", &v, Some(r.to_csv()))?;
            }
            Lemma::Phi => scalar(&sink, "phi", &phi_check(&default_grid(), 1e-12)?)?,
            Lemma::Bu => {
                let path = input.context("--lemma bu needs --input")?;
                let a = read_input(&path)?.matrix;
                let r = cross_term_check(
                    &a,
                    cfg.lemma_trials,
                    sub_seed(cfg.seed, "cross"),
                    None,
                    &budget,
                )?;
                let csv = format!(
                    "spark,stated_constant,worst_sampled,worst_exact,stated_violations\n{},{:e},{:e},{:e},{}\n",
                    r.spark, r.stated_constant, r.worst_sampled_ratio, r.worst_exact_ratio, r.exact_stated_violations
                );
                sink.emit("cross_term", &serde_json::to_value(&r)?, Some(csv))?;
            }
            Lemma::Chain => {
                let path = input.context("--lemma chain needs --input")?;
                let inp = read_input(&path)?;
                let x = planted(&inp, inp.x_star.is_none().then_some(1), &cfg, "chain/plant")?;
                let p = match p {
                    Some(p) => p,
                    None => gram_spectrum(&inp.matrix)?.p_star / 2.0,
                };
                let hs = sample_null(
                    &inp.matrix,
                    1,
                    sub_seed(cfg.seed, "chain/h"),
                    &[1.0],
                    None,
                    &budget,
                )?;
                let r = audit_theorem1_chain(&inp.matrix, &x, &hs[0].h, p)?;
                let mut csv = String::from("step,ln_lhs,ln_rhs,log_slack,holds\n");
                for s in &r.steps {
                    csv += &format!(
                        "{},{:e},{:e},{:e},{}\n",
                        s.name, s.ln_lhs, s.ln_rhs, s.log_slack, s.holds
                    );
                }
                sink.emit("chain", &serde_json::to_value(&r)?, Some(csv))?;
            }
        },
        Command::VerifyThm1 { input, k, p } => {
            let a = read_input(&input)?.matrix;
            let grid = p.or(match &cfg.p_grid {
                PGrid::Auto => None,
                PGrid::List(v) => Some(v.clone()),
            });
            let r = verify_theorem1(&a, k, grid.as_deref(), &harness_opts(&cfg, "theorem1/0"))?;
            let rows: Vec<_> = r.grid.iter().map(|g| (0, &g.report)).collect();
            sink.emit(
                "theorem1",
                &serde_json::to_value(&r)?,
                Some(margins_csv(&rows)),
            )?;
        }
        Command::VerifyThm2 { input, k, p } => {
            let inp = read_input(&input)?;
            let spec = need_spec(&inp)?;
            let x = planted(&inp, k, &cfg, "theorem2/plant")?;
            let p = match p {
                Some(p) => p,
                None => {
                    let a0 = lp_equiv::matgen::build_augmented_0(spec)?;
                    gram_spectrum(&a0)?.p_star / 2.0
                }
            };
            let r = verify_theorem2(
                spec,
                &x,
                p,
                &cfg.t_schedule,
                &harness_opts(&cfg, "theorem2/0"),
            )?;
            sink.emit(
                "theorem2",
                &serde_json::to_value(&r)?,
                Some(margins_csv(&[(0, &r.conclusion)])),
            )?;
        }
        Command::VerifyThm3 { input, k, p } => {
            let inp = read_input(&input)?;
            let spec = need_spec(&inp)?;
            let x = planted(&inp, k, &cfg, "theorem3/plant")?;
            let r = verify_theorem3(spec, &x, p, &harness_opts(&cfg, "theorem3/0"))?;
            sink.emit(
                "theorem3",
                &serde_json::to_value(&r)?,
                Some(margins_csv(&[(0, &r.conclusion)])),
            )?;
        }
        Command::Suite => {
            if let Some(dir) = cli.out {
                cfg.output_dir = dir;
            }
            let manifest = run_suite(&cfg)?;
            for c in &manifest.checks {
                let status = serde_json::to_value(c.status)?;
                eprintln!(
                    "{:<26} {:<9} {}",
                    c.name,
                    status.as_str().unwrap_or(""),
                    c.detail
                );
            }
            eprintln!(
                "manifest: {}",
                cfg.output_dir.join("manifest.json").display()
            );
            return Ok(ExitCode::from(manifest.exit_code() as u8));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
