//! Data emitters for the five standard plots.
//!
//! Each figure is a set of CSV tables plus a JSON sidecar holding the
//! resolved configuration, the library version and any assumed defaults.
//! Building the data and writing it are separate so tests can inspect the
//! tables without touching the file system.

use crate::config::{Method, RunConfig};
use crate::coverage::{coverage_curve, coverage_curve_mc, CoverageMethod, CoveragePoint, CoverageReport};
use crate::distmodel::DistributionModel;
use crate::error::{Error, Result};
use crate::hpd::{classify, endpoints, hpd_length, hpd_set, r_functions, RegimeLabel};
use crate::posterior::{point_mass, slab_density, PriorConfig};
use crate::scan::{linspace, ScanSettings};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const DEFAULT_ALPHA: f64 = 0.05;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_MC_N: u64 = 100_000;
pub const FIG1_W: [f64; 4] = [0.125, 0.25, 0.5, 1.0];

/// Formats a number with 12 significant digits, trailing zeros removed.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let s = format!("{:.*}", (11 - exp).max(0) as usize, v);
        trim_zeros(&s)
    } else {
        format!("{}e{exp}", trim_zeros(mant))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }
}

pub const COVERAGE_HEADER: [&str; 11] = [
    "theta0", "C", "C_minus", "C_plus", "frac_I", "frac_II", "frac_III", "frac_IV", "method", "n", "seed",
];

/// Coverage columns in CSV order.
pub fn coverage_cells(p: &CoveragePoint, method: &CoverageMethod) -> Vec<String> {
    let mut row = vec![fmt_num(p.theta0), fmt_num(p.c), fmt_num(p.c_minus), fmt_num(p.c_plus)];
    row.extend(p.regime_fractions.iter().map(|&f| fmt_num(f)));
    match method {
        CoverageMethod::ExactScan => row.extend(["exact".into(), String::new(), String::new()]),
        CoverageMethod::MonteCarlo { seed, n } => {
            row.extend(["mc".into(), n.to_string(), seed.to_string()])
        }
    }
    row
}

pub fn coverage_table(report: &CoverageReport) -> Table {
    let mut t = Table::new(COVERAGE_HEADER.to_vec());
    for p in report.points() {
        t.push(coverage_cells(&p, &report.method));
    }
    t
}

/// One figure's tables (file stem, table) and sidecar.
#[derive(Debug, Clone)]
pub struct FigureData {
    pub id: u8,
    pub tables: Vec<(String, Table)>,
    pub sidecar: Value,
}

impl FigureData {
    pub fn table(&self, stem: &str) -> Option<&Table> {
        self.tables.iter().find(|(s, _)| s == stem).map(|(_, t)| t)
    }

    /// Writes `<stem>.csv` for every table and `fig<id>.json`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let mut files = Vec::new();
        for (stem, t) in &self.tables {
            let p = dir.join(format!("{stem}.csv"));
            std::fs::write(&p, t.to_csv()).map_err(|e| io_err(&p, e))?;
            files.push(p);
        }
        let p = dir.join(format!("fig{}.json", self.id));
        let mut text = serde_json::to_string_pretty(&self.sidecar).expect("sidecar serialises");
        text.push('\n');
        std::fs::write(&p, text).map_err(|e| io_err(&p, e))?;
        files.push(p);
        Ok(files)
    }
}

fn io_err(p: &Path, e: std::io::Error) -> Error {
    Error::Config(format!("cannot write {}: {e}", p.display()))
}

/// Resolved values shared by all figures.
struct Common {
    alpha: f64,
    method: Method,
    seed: u64,
    n: u64,
    settings: ScanSettings,
}

impl Common {
    fn from(cfg: &RunConfig) -> Result<Self> {
        let settings = cfg.scan_settings();
        settings.validate()?;
        Ok(Self {
            alpha: cfg.alpha.unwrap_or(DEFAULT_ALPHA),
            method: cfg.method.unwrap_or(Method::Exact),
            seed: cfg.seed.unwrap_or(DEFAULT_SEED),
            n: cfg.n.unwrap_or(DEFAULT_MC_N),
            settings,
        })
    }

    fn resolved(&self, cfg: &RunConfig) -> RunConfig {
        let mut r = cfg.clone();
        r.alpha = Some(self.alpha);
        r.method = Some(self.method);
        r.seed = Some(self.seed);
        r.n = Some(self.n);
        r.scan_n = Some(self.settings.n);
        r.dense_extra = Some(self.settings.dense_extra);
        r.tol_tail = Some(self.settings.tol_tail);
        r.root_tol = Some(self.settings.root_tol);
        r
    }

    fn curve(&self, prior: &PriorConfig, grid: &[f64]) -> Result<CoverageReport> {
        match self.method {
            Method::Exact => coverage_curve(prior, grid, &self.settings),
            Method::Mc => coverage_curve_mc(prior, grid, self.n, self.seed),
        }
    }
}

fn sidecar(id: u8, resolved: &RunConfig, assumptions: &[&str], extra: Value) -> Value {
    json!({
        "figure": id,
        "library": "thetamin",
        "version": VERSION,
        "config": resolved,
        "assumptions": assumptions,
        "details": extra,
    })
}

fn dists_or(cfg: &RunConfig, default: &[DistributionModel]) -> Result<Vec<DistributionModel>> {
    Ok(match cfg.distribution()? {
        Some(d) => vec![d],
        None => default.to_vec(),
    })
}

/// Default coverage grid for figure 1: 400 points on `(λ, λ+2]`, 400 on
/// `(λ+2, λ+10]`, reflected to the negative axis.
pub fn fig1_positive_grid(lambda: f64) -> Vec<f64> {
    let mut g: Vec<f64> = (1..=400).map(|i| lambda + 2.0 * i as f64 / 400.0).collect();
    g.extend((1..=400).map(|i| lambda + 2.0 + 8.0 * i as f64 / 400.0));
    g
}

/// Reflects a curve computed at positive `θ₀` using `C(−θ₀) = C(θ₀)`, with the
/// one-sided parts exchanged.
fn mirror(points: &[CoveragePoint]) -> Vec<CoveragePoint> {
    let mut out: Vec<CoveragePoint> = points
        .iter()
        .rev()
        .map(|p| CoveragePoint {
            theta0: -p.theta0,
            c_minus: p.c_plus,
            c_plus: p.c_minus,
            ..*p
        })
        .collect();
    out.extend_from_slice(points);
    out
}

pub fn figure1(cfg: &RunConfig) -> Result<FigureData> {
    let common = Common::from(cfg)?;
    let dists = dists_or(
        cfg,
        &[DistributionModel::gaussian(), DistributionModel::laplace(), DistributionModel::student_t3()],
    )?;
    let lambdas = cfg.lambda.map_or(vec![0.5, 5.0], |l| vec![l]);
    let ws = cfg.w.clone().unwrap_or_else(|| FIG1_W.to_vec());
    let mut header = vec!["dist", "lambda", "w"];
    header.extend(COVERAGE_HEADER);
    let mut table = Table::new(header);
    for d in &dists {
        for &lam in &lambdas {
            for &w in &ws {
                let prior = PriorConfig::new(*d, lam, w, common.alpha)?;
                let (points, method) = match cfg.grid {
                    Some(g) => {
                        let r = common.curve(&prior, &g.points())?;
                        (r.points().collect::<Vec<_>>(), r.method)
                    }
                    None => {
                        let r = common.curve(&prior, &fig1_positive_grid(lam))?;
                        (mirror(&r.points().collect::<Vec<_>>()), r.method)
                    }
                };
                for p in &points {
                    let mut row = vec![d.to_string(), fmt_num(lam), fmt_num(w)];
                    row.extend(coverage_cells(p, &method));
                    table.push(row);
                }
            }
        }
    }
    let grid_note = match cfg.grid {
        Some(g) => json!({ "kind": "explicit", "spec": g.to_string() }),
        None => json!({
            "kind": "default",
            "near": "400 points lambda + 2*i/400, i = 1..400",
            "far": "400 points lambda + 2 + 8*i/400, i = 1..400",
            "mirrored": "C(-theta0) = C(theta0) with C_minus and C_plus exchanged",
        }),
    };
    let dist_names: Vec<String> = dists.iter().map(|d| d.to_string()).collect();
    let extra = json!({ "dists": dist_names, "lambdas": lambdas, "w": ws, "theta0_grid": grid_note });
    let mut resolved = common.resolved(cfg);
    resolved.w = Some(ws);
    let assumptions = ["w sweep {0.125, 0.25, 0.5, 1} when w is not given", "t3 has unit scale"];
    Ok(FigureData {
        id: 1,
        tables: vec![("fig1".into(), table)],
        sidecar: sidecar(1, &resolved, &assumptions, extra),
    })
}

pub const FIG2_X: f64 = 1.25;

pub fn figure2(cfg: &RunConfig) -> Result<FigureData> {
    let common = Common::from(cfg)?;
    let dist = cfg.distribution()?.unwrap_or_else(DistributionModel::gaussian);
    let lam = cfg.lambda.unwrap_or(0.5);
    let ws = cfg.w.clone().unwrap_or_else(|| vec![1.0, 0.25]);
    let theta = cfg.grid.map_or_else(|| linspace(-4.0, 5.0, 901), |g| g.points());
    let cov_grid = cfg.grid.map_or_else(|| linspace(-4.0, 5.0, 181), |g| g.points());
    let mut dens = Table::new(vec!["w", "theta", "prior_slab", "likelihood", "posterior_slab", "in_hpd"]);
    let mut header = vec!["w"];
    header.extend(COVERAGE_HEADER);
    let mut cov = Table::new(header);
    let mut panels = Vec::new();
    for &w in &ws {
        let prior = PriorConfig::new(dist, lam, w, common.alpha)?;
        let set = hpd_set(&prior, FIG2_X)?;
        for &t in &theta {
            let in_slab = lam == 0.0 || t.abs() > lam;
            dens.push(vec![
                fmt_num(w),
                fmt_num(t),
                fmt_num(if in_slab { w } else { 0.0 }),
                fmt_num(dist.density(FIG2_X - t)),
                fmt_num(slab_density(&prior, FIG2_X, t)),
                (set.contains(t) as u8).to_string(),
            ]);
        }
        let report = common.curve(&prior, &cov_grid)?;
        for p in report.points() {
            let mut row = vec![fmt_num(w)];
            row.extend(coverage_cells(&p, &report.method));
            cov.push(row);
        }
        panels.push(json!({
            "w": w,
            "prior_atom": 1.0 - w,
            "posterior_atom": point_mass(&prior, FIG2_X),
            "t_alpha": prior.t_alpha().value(),
            "hpd": set,
        }));
    }
    let mut resolved = common.resolved(cfg);
    resolved.dist = Some(dist.to_string());
    resolved.lambda = Some(lam);
    resolved.w = Some(ws);
    let extra = json!({
        "x": FIG2_X,
        "theta_grid": cfg.grid.map_or("-4:5:901".to_string(), |g| g.to_string()),
        "coverage_grid": cfg.grid.map_or("-4:5:181".to_string(), |g| g.to_string()),
        "panels": panels,
    });
    let assumptions = ["prior_slab is the unnormalised slab weight w on |theta| > lambda"];
    Ok(FigureData {
        id: 2,
        tables: vec![("fig2_density".into(), dens), ("fig2_coverage".into(), cov)],
        sidecar: sidecar(2, &resolved, &assumptions, extra),
    })
}

fn active_r(r: RegimeLabel) -> &'static str {
    match r {
        RegimeLabel::I => "R1",
        RegimeLabel::II => "R2",
        RegimeLabel::III => "R3",
        RegimeLabel::IV | RegimeLabel::Atom => "none",
    }
}

pub fn figure3(cfg: &RunConfig) -> Result<FigureData> {
    let common = Common::from(cfg)?;
    let dist = cfg.distribution()?.unwrap_or_else(DistributionModel::laplace);
    let lam = cfg.lambda.unwrap_or(5.0);
    let ws = cfg.w.clone().unwrap_or_else(|| vec![1.0]);
    let xs = cfg.grid.map_or_else(|| linspace(0.0, 15.0, 1501), |g| g.points());
    let mut t = Table::new(vec!["w", "x", "R1", "R2", "R3", "regime", "active"]);
    for &w in &ws {
        let prior = PriorConfig::new(dist, lam, w, common.alpha)?;
        for &x in &xs {
            let r = r_functions(&prior, x);
            let regime = classify(&prior, x);
            t.push(vec![
                fmt_num(w),
                fmt_num(x),
                fmt_num(r.r1.to_f64()),
                fmt_num(r.r2.to_f64()),
                fmt_num(r.r3.to_f64()),
                regime.to_string(),
                active_r(regime).into(),
            ]);
        }
    }
    let mut resolved = common.resolved(cfg);
    resolved.dist = Some(dist.to_string());
    resolved.lambda = Some(lam);
    resolved.w = Some(ws);
    let extra = json!({ "x_grid": cfg.grid.map_or("0:15:1501".to_string(), |g| g.to_string()) });
    Ok(FigureData {
        id: 3,
        tables: vec![("fig3".into(), t)],
        sidecar: sidecar(3, &resolved, &[], extra),
    })
}

/// `(λ, w)` panels for figures 4 and 5.
fn endpoint_panels(cfg: &RunConfig) -> Vec<(f64, f64)> {
    match (cfg.lambda, &cfg.w) {
        (None, None) => vec![(0.5, 0.25), (5.0, 0.25), (5.0, 1.0)],
        (l, w) => {
            let ls = l.map_or(vec![0.5, 5.0], |l| vec![l]);
            let ws = w.clone().unwrap_or_else(|| vec![0.25, 1.0]);
            ls.iter().flat_map(|&l| ws.iter().map(move |&w| (l, w))).collect()
        }
    }
}

fn endpoint_figure(id: u8, cfg: &RunConfig) -> Result<FigureData> {
    let common = Common::from(cfg)?;
    let dist = cfg.distribution()?.unwrap_or_else(DistributionModel::laplace);
    let xs = cfg.grid.map_or_else(|| linspace(-15.0, 15.0, 1201), |g| g.points());
    let panels = endpoint_panels(cfg);
    let nominal = 2.0 * dist.quantile(1.0 - common.alpha / 2.0);
    let mut t = if id == 4 {
        Table::new(vec!["lambda", "w", "x", "L", "U", "regime"])
    } else {
        Table::new(vec!["lambda", "w", "x", "length", "nominal", "regime"])
    };
    for &(lam, w) in &panels {
        let prior = PriorConfig::new(dist, lam, w, common.alpha)?;
        for &x in &xs {
            let e = endpoints(&prior, x);
            let regime = e.map_or(RegimeLabel::Atom, |(_, _, r)| r).to_string();
            let mut row = vec![fmt_num(lam), fmt_num(w), fmt_num(x)];
            if id == 4 {
                match e {
                    Some((l, u, _)) => row.extend([fmt_num(l), fmt_num(u)]),
                    None => row.extend([String::new(), String::new()]),
                }
            } else {
                row.extend([fmt_num(hpd_length(&prior, x)?), fmt_num(nominal)]);
            }
            row.push(regime);
            t.push(row);
        }
    }
    let mut resolved = common.resolved(cfg);
    resolved.dist = Some(dist.to_string());
    let mut extra = json!({
        "panels": panels.iter().map(|(l, w)| json!({ "lambda": l, "w": w })).collect::<Vec<_>>(),
        "x_grid": cfg.grid.map_or("-15:15:1201".to_string(), |g| g.to_string()),
    });
    if id == 5 {
        extra["nominal"] = json!(nominal);
    }
    let assumptions: &[&str] = if id == 4 {
        &["L and U are empty where the credible set is the atom alone"]
    } else {
        &["length counts the interval part only; the atom has length zero"]
    };
    Ok(FigureData {
        id,
        tables: vec![(format!("fig{id}"), t)],
        sidecar: sidecar(id, &resolved, assumptions, extra),
    })
}

pub fn figure4(cfg: &RunConfig) -> Result<FigureData> {
    endpoint_figure(4, cfg)
}

pub fn figure5(cfg: &RunConfig) -> Result<FigureData> {
    endpoint_figure(5, cfg)
}

pub fn figure(id: u8, cfg: &RunConfig) -> Result<FigureData> {
    match id {
        1 => figure1(cfg),
        2 => figure2(cfg),
        3 => figure3(cfg),
        4 => figure4(cfg),
        5 => figure5(cfg),
        _ => Err(Error::Config(format!("unknown figure {id} (1-5)"))),
    }
}

/// Renders a short summary line per table, used by the CLI.
pub fn summary(data: &FigureData) -> String {
    let mut s = String::new();
    for (stem, t) in &data.tables {
        let _ = writeln!(s, "{stem}: {} rows", t.rows.len());
    }
    s
}
