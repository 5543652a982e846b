//! Post-selection confidence sets from credible sets (slab-only prior).
//!
//! With `w = 1` and selection event `|X| ≥ λ`, inverting the credible set
//! map gives `PS(x) = {θ : x ∈ HPD(θ)}`, where `HPD(θ)` is the credible set
//! computed as if `θ` had been observed. Its conditional coverage given
//! selection is at least `1 − α`.

use crate::coverage::mc::for_each_draw;
use crate::error::{require_finite, Error, Result};
use crate::hpd::endpoints;
use crate::posterior::{Interval, PriorConfig};
use crate::scan::{build_grid, finish_grid, label_segments, quantile_points, ScanSettings};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PostSelectionSet {
    pub x_observed: f64,
    pub intervals: Vec<Interval>,
    pub alpha: f64,
    pub lambda: f64,
}

impl PostSelectionSet {
    pub fn contains(&self, theta: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(theta))
    }
}

fn require_selected(cfg: &PriorConfig, x: f64) -> Result<()> {
    if cfg.w != 1.0 {
        return Err(Error::RequiresSlabOnly(cfg.w));
    }
    require_finite("x", x)?;
    if x.abs() < cfg.lambda {
        return Err(Error::NotSelected { x, lambda: cfg.lambda });
    }
    Ok(())
}

/// `x ∈ HPD(θ)` for the slab-only prior (no atom, `t_α = −∞`).
pub fn in_credible_set(cfg: &PriorConfig, theta: f64, x: f64) -> bool {
    let outside_gap = x.abs() >= cfg.lambda;
    match endpoints(cfg, theta) {
        Some((l, u, _)) => outside_gap && l <= x && x <= u,
        None => false,
    }
}

/// Half-width of the `θ` scan around `x`.
fn scan_half_width(cfg: &PriorConfig, settings: &ScanSettings) -> f64 {
    2.0 * cfg.lambda + cfg.dist.quantile(1.0 - 0.5 * settings.tol_tail)
}

/// `PS(x) = {θ : x ∈ HPD(θ)}` by scanning `θ` over `x ± B`.
pub fn post_selection_set(cfg: &PriorConfig, x: f64, settings: &ScanSettings) -> Result<PostSelectionSet> {
    require_selected(cfg, x)?;
    settings.validate()?;
    let b = scan_half_width(cfg, settings);
    let mut grid = build_grid(cfg, x - b, x + b, settings, &[x, -x]);
    grid.extend(quantile_points(&cfg.dist, x, settings.n, settings.tol_tail));
    let grid = finish_grid(grid);
    let segs = label_segments(|t| in_credible_set(cfg, t, x), &grid, settings.root_tol)?;
    let intervals = segs
        .iter()
        .filter(|s| s.label)
        .map(|s| Interval::new(s.lo.max(x - b), s.hi.min(x + b)))
        .collect();
    Ok(PostSelectionSet {
        x_observed: x,
        intervals,
        alpha: cfg.alpha,
        lambda: cfg.lambda,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionalCoverage {
    pub theta0: f64,
    pub coverage_hat: f64,
    pub stderr: f64,
    pub acceptance_rate: f64,
    pub accepted: u64,
    pub n: u64,
    pub seed: u64,
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    accepted: u64,
    covered: u64,
}

impl std::ops::AddAssign for Tally {
    fn add_assign(&mut self, o: Self) {
        self.accepted += o.accepted;
        self.covered += o.covered;
    }
}

/// Monte Carlo estimate of `P_{θ₀}(θ₀ ∈ PS(X) | |X| ≥ λ)`.
///
/// Membership uses `θ₀ ∈ PS(X) ⇔ X ∈ HPD(θ₀)`, so `HPD(θ₀)` is computed once.
pub fn conditional_coverage_mc(cfg: &PriorConfig, theta0: f64, n: u64, seed: u64) -> Result<ConditionalCoverage> {
    if cfg.w != 1.0 {
        return Err(Error::RequiresSlabOnly(cfg.w));
    }
    require_finite("theta0", theta0)?;
    let (l, u, _) = endpoints(cfg, theta0).expect("no atom region when w = 1");
    let lam = cfg.lambda;
    let tally: Tally = for_each_draw(&cfg.dist, theta0, n, seed, |acc: &mut Tally, x| {
        if x.abs() >= lam {
            acc.accepted += 1;
            acc.covered += (l <= x && x <= u) as u64;
        }
    });
    if tally.accepted == 0 {
        return Err(Error::NoAcceptedDraws);
    }
    let m = tally.accepted as f64;
    let p = tally.covered as f64 / m;
    Ok(ConditionalCoverage {
        theta0,
        coverage_hat: p,
        stderr: (p * (1.0 - p) / m).sqrt(),
        acceptance_rate: m / n as f64,
        accepted: tally.accepted,
        n,
        seed,
    })
}

/// Exact `P_{θ₀}(X ∈ HPD(θ₀) | |X| ≥ λ)` from CDF differences.
pub fn conditional_coverage_exact(cfg: &PriorConfig, theta0: f64) -> Result<f64> {
    if cfg.w != 1.0 {
        return Err(Error::RequiresSlabOnly(cfg.w));
    }
    require_finite("theta0", theta0)?;
    let (l, u, _) = endpoints(cfg, theta0).expect("no atom region when w = 1");
    let d = &cfg.dist;
    let pieces = crate::hpd::remove_gap(l, u, cfg.lambda);
    let hit: f64 = pieces
        .iter()
        .map(|i| d.prob_between(i.lo - theta0, i.hi - theta0))
        .sum();
    let selected = d.cdf(-cfg.lambda - theta0) + d.cdf(theta0 - cfg.lambda);
    Ok(hit / selected)
}
