//! Frequentist coverage `C(θ₀) = P_{θ₀}(θ₀ ∈ HPD(X))` of the HPD set.
//!
//! The exact method partitions the `x`-line into runs on which membership
//! (and the active regime) is constant and sums `G`-differences over the
//! member runs. `C⁻` collects members with `x ≥ θ₀`, `C⁺` those with `x < θ₀`.

pub mod bounds;
pub mod mc;

use crate::error::{require_finite, Result};
use crate::hpd::{endpoints, ms, RegimeLabel};
use crate::posterior::PriorConfig;
use crate::scan::{build_grid, finish_grid, label_segments, quantile_points, ScanSettings, Segment};
use rayon::prelude::*;
use serde::Serialize;

pub use bounds::{check_bounds, BoundCheck, BoundReport, BoundStatus};
pub use mc::{coverage_mc, McCoverage};

/// Membership of `θ₀` in `HPD(x)`, split by side and attributed to a regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverageLabel {
    /// Regime of `x` when `θ₀ ∈ HPD(x)`.
    pub member: Option<RegimeLabel>,
    /// `θ₀ ∈ [L(x), x]` with `|x| > t_α`.
    pub minus: bool,
    /// `θ₀ ∈ (x, U(x)]` with `|x| > t_α`.
    pub plus: bool,
}

pub fn coverage_label(cfg: &PriorConfig, theta0: f64, x: f64) -> CoverageLabel {
    let atom_member = theta0 == 0.0 && cfg.w < 1.0;
    match endpoints(cfg, x) {
        None => CoverageLabel {
            member: atom_member.then_some(RegimeLabel::Atom),
            minus: false,
            plus: false,
        },
        Some((l, u, regime)) => {
            let in_support = theta0.abs() >= cfg.lambda || cfg.lambda == 0.0;
            let in_interval = in_support && l <= theta0 && theta0 <= u;
            CoverageLabel {
                member: (in_interval || atom_member).then_some(regime),
                minus: in_support && l <= theta0 && theta0 <= x,
                plus: in_support && x < theta0 && theta0 <= u,
            }
        }
    }
}

/// Coverage at one `θ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoveragePoint {
    pub theta0: f64,
    pub c: f64,
    pub c_minus: f64,
    pub c_plus: f64,
    /// Share of `C` contributed by `x` in regimes I–IV (zero when `C = 0`).
    pub regime_fractions: [f64; 4],
}

/// Grid for a coverage scan at `θ₀`: quantile-spaced around `θ₀`, a uniform
/// layer over `θ₀ ± B`, and dense windows around the switch points.
fn coverage_grid(cfg: &PriorConfig, theta0: f64, settings: &ScanSettings) -> Vec<f64> {
    let b = cfg.dist.quantile(1.0 - 0.5 * settings.tol_tail);
    let mut pts = build_grid(cfg, theta0 - b, theta0 + b, settings, &[theta0, -theta0]);
    pts.extend(quantile_points(&cfg.dist, theta0, settings.n, settings.tol_tail));
    finish_grid(pts)
}

fn segment_mass<L>(cfg: &PriorConfig, theta0: f64, s: &Segment<L>) -> f64 {
    cfg.dist.prob_between(s.lo - theta0, s.hi - theta0)
}

/// Exact coverage by membership scan.
pub fn coverage_exact(cfg: &PriorConfig, theta0: f64, settings: &ScanSettings) -> Result<CoveragePoint> {
    require_finite("theta0", theta0)?;
    settings.validate()?;
    let grid = coverage_grid(cfg, theta0, settings);
    let segs = label_segments(|x| coverage_label(cfg, theta0, x), &grid, settings.root_tol)?;
    let (mut c, mut cm, mut cp) = (0.0, 0.0, 0.0);
    let mut by_regime = [0.0; 4];
    for s in &segs {
        let l = s.label;
        if l.member.is_none() && !l.minus && !l.plus {
            continue;
        }
        let m = segment_mass(cfg, theta0, s);
        if let Some(r) = l.member {
            c += m;
            if r != RegimeLabel::Atom {
                by_regime[r.index()] += m;
            }
        }
        if l.minus {
            cm += m;
        }
        if l.plus {
            cp += m;
        }
    }
    let regime_fractions = if c > 0.0 {
        by_regime.map(|v| v / c)
    } else {
        [0.0; 4]
    };
    Ok(CoveragePoint {
        theta0,
        c: c.min(1.0),
        c_minus: cm,
        c_plus: cp,
        regime_fractions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoverageMethod {
    ExactScan,
    MonteCarlo { seed: u64, n: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageReport {
    pub config: PriorConfig,
    pub method: CoverageMethod,
    pub theta0_grid: Vec<f64>,
    pub c: Vec<f64>,
    pub c_minus: Vec<f64>,
    pub c_plus: Vec<f64>,
    pub regime_fractions: Vec<[f64; 4]>,
}

impl CoverageReport {
    fn from_points(config: PriorConfig, method: CoverageMethod, pts: Vec<CoveragePoint>) -> Self {
        Self {
            config,
            method,
            theta0_grid: pts.iter().map(|p| p.theta0).collect(),
            c: pts.iter().map(|p| p.c).collect(),
            c_minus: pts.iter().map(|p| p.c_minus).collect(),
            c_plus: pts.iter().map(|p| p.c_plus).collect(),
            regime_fractions: pts.iter().map(|p| p.regime_fractions).collect(),
        }
    }

    pub fn points(&self) -> impl Iterator<Item = CoveragePoint> + '_ {
        (0..self.c.len()).map(|i| CoveragePoint {
            theta0: self.theta0_grid[i],
            c: self.c[i],
            c_minus: self.c_minus[i],
            c_plus: self.c_plus[i],
            regime_fractions: self.regime_fractions[i],
        })
    }
}

/// Exact coverage over a grid, evaluated in parallel and returned in grid order.
pub fn coverage_curve(cfg: &PriorConfig, grid: &[f64], settings: &ScanSettings) -> Result<CoverageReport> {
    let pts: Result<Vec<CoveragePoint>> = grid
        .par_iter()
        .map(|&t| coverage_exact(cfg, t, settings))
        .collect();
    Ok(CoverageReport::from_points(*cfg, CoverageMethod::ExactScan, pts?))
}

/// Monte Carlo coverage over a grid; point `i` uses stream seed `seed + i`.
pub fn coverage_curve_mc(cfg: &PriorConfig, grid: &[f64], n: u64, seed: u64) -> Result<CoverageReport> {
    let pts: Result<Vec<CoveragePoint>> = grid
        .iter()
        .enumerate()
        .map(|(i, &t)| coverage_mc(cfg, t, n, seed.wrapping_add(i as u64)).map(|m| m.as_point()))
        .collect();
    Ok(CoverageReport::from_points(
        *cfg,
        CoverageMethod::MonteCarlo { seed, n },
        pts?,
    ))
}

/// Coverage of the one-sided HPD under the prior `𝟏(θ > λ)` (requires `w = 1`).
pub fn ms_coverage_exact(cfg: &PriorConfig, theta0: f64, settings: &ScanSettings) -> Result<f64> {
    require_finite("theta0", theta0)?;
    settings.validate()?;
    ms::ms_upper(cfg, theta0)?;
    let grid = coverage_grid(cfg, theta0, settings);
    let label = |x: f64| {
        let (l, u) = ms::ms_endpoints(cfg, x).expect("validated above");
        l <= theta0 && theta0 <= u
    };
    let segs = label_segments(label, &grid, settings.root_tol)?;
    Ok(segs
        .iter()
        .filter(|s| s.label)
        .map(|s| segment_mass(cfg, theta0, s))
        .sum())
}

/// `min_{x ≥ λ} U(x)`: for `λ ≥ t_α`, `{θ₀ : sup U⁻¹(θ₀) ≥ λ} = [θ_start, ∞)`
/// because `U` is continuous on `[λ, ∞)` and tends to `+∞`.
pub fn dip_region_start(cfg: &PriorConfig, settings: &ScanSettings) -> Result<f64> {
    let lam = cfg.lambda;
    let t = cfg.t_alpha();
    let start = if t.covers(lam) {
        t.value() + 1e-12 * (1.0 + t.value())
    } else {
        lam
    };
    let hi = start + 2.0 * cfg.dist.quantile(1.0 - 0.5 * cfg.alpha) + 1.0;
    let u = |x: f64| crate::hpd::upper(cfg, x);
    let n = settings.n.max(64);
    let mut best = (start, u(start)?);
    for i in 1..=n {
        let x = start + (hi - start) * i as f64 / n as f64;
        let v = u(x)?;
        if v < best.1 {
            best = (x, v);
        }
    }
    // golden-section polish around the best grid point
    let h = (hi - start) / n as f64;
    let (mut a, mut b) = ((best.0 - h).max(start), (best.0 + h).min(hi));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if u(c)? <= u(d)? {
            b = d;
        } else {
            a = c;
        }
    }
    let polished = u(0.5 * (a + b))?;
    Ok(best.1.min(polished))
}
