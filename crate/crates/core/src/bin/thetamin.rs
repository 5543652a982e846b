//! Command-line front end.
//!
//! Settings come from an optional `--config FILE` in `key=value` form and are
//! overridden by flags. `HPD_THREADS` sets the worker pool size.

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thetamin::config::{GridSpec, Method, RunConfig};
use thetamin::coverage::bounds::{check_bounds, BoundStatus};
use thetamin::figures::{self, coverage_table, DEFAULT_ALPHA, DEFAULT_MC_N, DEFAULT_SEED};
use thetamin::hpd::hpd_set;
use thetamin::posterior::PriorConfig;
use thetamin::postselect::{conditional_coverage_mc, post_selection_set};
use thetamin::{coverage, error::Error};

#[derive(Parser)]
#[command(name = "thetamin", version, about = "HPD credible sets and their frequentist coverage under the theta-min prior")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Config file with key=value lines; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// gaussian | laplace | t3 | subexp:ETA
    #[arg(long, global = true)]
    dist: Option<String>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Slab weight; a comma-separated list where a sweep is allowed.
    #[arg(long, global = true, value_delimiter = ',')]
    w: Option<Vec<f64>>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Evenly spaced grid a:b:n.
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid: Option<String>,
    /// exact | mc
    #[arg(long, global = true)]
    method: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo sample size.
    #[arg(long, global = true)]
    n: Option<u64>,
    #[arg(long, global = true)]
    scan_n: Option<usize>,
    #[arg(long, global = true)]
    dense_extra: Option<usize>,
    #[arg(long, global = true)]
    tol_tail: Option<f64>,
    #[arg(long, global = true)]
    root_tol: Option<f64>,
    /// Output file (or directory for `figure`); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Credible set for one or more observations.
    Hpd {
        #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Coverage curve over a theta0 grid, as CSV.
    Coverage {
        #[command(flatten)]
        common: Common,
    },
    /// Numerical checks of the coverage bounds, as JSON.
    Bounds {
        #[command(flatten)]
        common: Common,
    },
    /// Post-selection confidence set for an observation (w = 1).
    Postselect {
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo conditional coverage of the post-selection set.
    PostselectCoverage {
        #[arg(long, allow_negative_numbers = true)]
        theta0: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Data behind figure 1-5, written to the --out directory.
    Figure {
        id: u8,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult = std::result::Result<(), Failure>;

fn run_config(c: &Common) -> Result<RunConfig, Failure> {
    let base = match &c.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(d) = &c.dist {
        thetamin::distmodel::DistributionModel::parse(d)?;
    }
    let flags = RunConfig {
        dist: c.dist.clone(),
        lambda: c.lambda,
        w: c.w.clone(),
        alpha: c.alpha,
        grid: c.grid.as_deref().map(str::parse::<GridSpec>).transpose()?,
        method: c.method.as_deref().map(str::parse::<Method>).transpose()?,
        seed: c.seed,
        n: c.n,
        scan_n: c.scan_n,
        dense_extra: c.dense_extra,
        tol_tail: c.tol_tail,
        root_tol: c.root_tol,
        out: c.out.clone(),
    };
    Ok(base.overlay(&flags))
}

/// A single prior from the config; `w` defaults to 1 and must not be a list.
fn prior(cfg: &RunConfig) -> Result<PriorConfig, Failure> {
    let dist = cfg
        .distribution()?
        .ok_or_else(|| Failure::Usage("missing --dist (or dist= in the config)".into()))?;
    let lambda = cfg
        .lambda
        .ok_or_else(|| Failure::Usage("missing --lambda (or lambda= in the config)".into()))?;
    let w = match cfg.w.as_deref() {
        None => 1.0,
        Some([w]) => *w,
        Some(_) => return Err(Failure::Usage("this command takes a single w".into())),
    };
    Ok(PriorConfig::new(dist, lambda, w, cfg.alpha.unwrap_or(DEFAULT_ALPHA))?)
}

fn grid(cfg: &RunConfig) -> Result<Vec<f64>, Failure> {
    cfg.grid
        .map(|g| g.points())
        .ok_or_else(|| Failure::Usage("missing --grid a:b:n (or grid= in the config)".into()))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult {
    match out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())
                .map_err(|e| Failure::Usage(format!("stdout: {e}")))
        }
    }
}

fn emit_json(out: Option<&Path>, v: &serde_json::Value) -> CliResult {
    let mut s = serde_json::to_string_pretty(v).expect("json value serialises");
    s.push('\n');
    emit(out, &s)
}

fn cmd_hpd(xs: &[f64], cfg: &RunConfig) -> CliResult {
    let p = prior(cfg)?;
    let mut sets = Vec::new();
    for &x in xs {
        let s = hpd_set(&p, x)?;
        sets.push(json!({
            "x": x,
            "regime": s.regime.to_string(),
            "L": s.lower,
            "U": s.upper,
            "intervals": s.intervals,
            "length": s.length(),
            "atom": s.atom_included,
        }));
    }
    let v = if sets.len() == 1 { sets.remove(0) } else { json!(sets) };
    emit_json(cfg.out.as_deref(), &v)
}

fn cmd_coverage(cfg: &RunConfig) -> CliResult {
    let p = prior(cfg)?;
    let g = grid(cfg)?;
    let report = match cfg.method.unwrap_or(Method::Exact) {
        Method::Exact => coverage::coverage_curve(&p, &g, &cfg.scan_settings())?,
        Method::Mc => coverage::coverage_curve_mc(
            &p,
            &g,
            cfg.n.unwrap_or(DEFAULT_MC_N),
            cfg.seed.unwrap_or(DEFAULT_SEED),
        )?,
    };
    emit(cfg.out.as_deref(), &coverage_table(&report).to_csv())
}

fn cmd_bounds(cfg: &RunConfig) -> CliResult {
    let p = prior(cfg)?;
    let report = check_bounds(&p, &grid(cfg)?, &cfg.scan_settings())?;
    emit_json(cfg.out.as_deref(), &json!(report))?;
    if report.passed() {
        return Ok(());
    }
    let mut msg = String::from("bound checks failed:");
    for item in report.items.iter().filter(|i| i.status == BoundStatus::Fail) {
        let pts: Vec<String> = item.failing.iter().map(|t| t.to_string()).collect();
        msg.push_str(&format!(
            "\n  {}: margin {:?}, exponent {:?}, failing theta0 [{}]",
            item.name,
            item.margin,
            item.exponent,
            pts.join(", ")
        ));
    }
    Err(Failure::Check(msg))
}

fn cmd_postselect(x: f64, cfg: &RunConfig) -> CliResult {
    let p = prior(cfg)?;
    let ps = post_selection_set(&p, x, &cfg.scan_settings())?;
    emit_json(cfg.out.as_deref(), &json!(ps))
}

fn cmd_postselect_coverage(theta0: f64, cfg: &RunConfig) -> CliResult {
    let p = prior(cfg)?;
    let n = cfg.n.unwrap_or(DEFAULT_MC_N);
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    let c = conditional_coverage_mc(&p, theta0, n, seed)?;
    emit_json(
        cfg.out.as_deref(),
        &json!({
            "theta0": theta0,
            "coverage": c.coverage_hat,
            "stderr": c.stderr,
            "acceptance_rate": c.acceptance_rate,
            "accepted": c.accepted,
            "n": n,
            "seed": seed,
        }),
    )
}

fn cmd_figure(id: u8, cfg: &RunConfig) -> CliResult {
    let data = figures::figure(id, cfg)?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let files = data.write(&dir)?;
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn set_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("HPD_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("HPD_THREADS='{v}' is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = set_threads().and_then(|_| match &cli.command {
        Command::Hpd { x, common } => cmd_hpd(x, &run_config(common)?),
        Command::Coverage { common } => cmd_coverage(&run_config(common)?),
        Command::Bounds { common } => cmd_bounds(&run_config(common)?),
        Command::Postselect { x, common } => cmd_postselect(*x, &run_config(common)?),
        Command::PostselectCoverage { theta0, common } => {
            cmd_postselect_coverage(*theta0, &run_config(common)?)
        }
        Command::Figure { id, common } => cmd_figure(*id, &run_config(common)?),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
