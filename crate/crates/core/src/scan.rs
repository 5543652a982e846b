//! Grid scans for piecewise-constant labels and sign changes.
//!
//! A label function is sampled on a sorted grid; wherever neighbouring grid
//! points disagree the switch point is located by bisection. The result is
//! a partition of the real line into labelled segments.

use crate::distmodel::DistributionModel;
use crate::error::{Error, Result};
use crate::numeric::bisect_predicate;
use crate::posterior::PriorConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSettings {
    /// Base grid size.
    pub n: usize,
    /// Extra points in each densified window around `±λ` and `±t_α`.
    pub dense_extra: usize,
    /// Tail mass left outside the scanned range.
    pub tol_tail: f64,
    /// Width to which switch points and roots are refined.
    pub root_tol: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            n: 4096,
            dense_extra: 512,
            tol_tail: 1e-9,
            root_tol: 1e-10,
        }
    }
}

impl ScanSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_tail > 0.0 && self.tol_tail < 1.0) {
            return Err(Error::InvalidParameter {
                name: "tol_tail",
                value: self.tol_tail,
                reason: "must lie in (0, 1)",
            });
        }
        if self.root_tol.is_nan() || self.root_tol <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "root_tol",
                value: self.root_tol,
                reason: "must be positive",
            });
        }
        if self.n < 2 {
            return Err(Error::EmptyGrid);
        }
        Ok(())
    }
}

/// `n` evenly spaced points on `[a, b]` (both ends included).
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (a + b)],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Points where the HPD can switch form: `±λ`, `±t_α` (when finite).
pub fn breakpoints(cfg: &PriorConfig) -> Vec<f64> {
    let mut v = vec![cfg.lambda, -cfg.lambda];
    if let Some(t) = cfg.t_alpha().finite() {
        v.push(t);
        v.push(-t);
    }
    v
}

/// Uniform grid on `[lo, hi]` plus `dense_extra` points in each window of
/// half-width one around `±λ`, `±t_α`, and any `extra` centres.
pub fn build_grid(
    cfg: &PriorConfig,
    lo: f64,
    hi: f64,
    settings: &ScanSettings,
    extra: &[f64],
) -> Vec<f64> {
    let mut pts = linspace(lo, hi, settings.n);
    let mut centres = breakpoints(cfg);
    centres.extend_from_slice(extra);
    for c in centres {
        let a = (c - 1.0).max(lo);
        let b = (c + 1.0).min(hi);
        if a < b {
            pts.extend(linspace(a, b, settings.dense_extra));
        }
        if lo < c && c < hi {
            pts.push(c);
        }
    }
    finish_grid(pts)
}

/// Adds `center + G⁻¹(u)` for `n` evenly spaced `u` in the central
/// `1 − tol_tail` probability range; puts grid points where `P_{center}` has mass.
pub fn quantile_points(dist: &DistributionModel, center: f64, n: usize, tol_tail: f64) -> Vec<f64> {
    let lo = 0.5 * tol_tail;
    (0..n)
        .map(|i| {
            let u = lo + (1.0 - 2.0 * lo) * (i as f64 + 0.5) / n as f64;
            center + dist.quantile(u)
        })
        .collect()
}

pub fn finish_grid(mut pts: Vec<f64>) -> Vec<f64> {
    pts.retain(|p| p.is_finite());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// A maximal run `[lo, hi]` on which the label is constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<L> {
    pub lo: f64,
    pub hi: f64,
    pub label: L,
}

/// Partitions `ℝ` into labelled segments by sampling `label` on `grid`
/// and bisecting every disagreement between neighbours to `tol`.
///
/// The outermost segments extend to `±∞` with the label of the end points.
/// Label changes that start and end between the same two grid points are
/// not seen.
pub fn label_segments<L, F>(label: F, grid: &[f64], tol: f64) -> Result<Vec<Segment<L>>>
where
    L: Copy + PartialEq,
    F: Fn(f64) -> L,
{
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let labels: Vec<L> = grid.iter().map(|&x| label(x)).collect();
    let mut out = Vec::new();
    let mut start = f64::NEG_INFINITY;
    let mut current = labels[0];
    for i in 1..grid.len() {
        if labels[i] == current {
            continue;
        }
        let (a, b) = bisect_predicate(&label, grid[i - 1], grid[i], tol);
        let mid = 0.5 * (a + b);
        out.push(Segment {
            lo: start,
            hi: mid,
            label: current,
        });
        start = mid;
        current = labels[i];
    }
    out.push(Segment {
        lo: start,
        hi: f64::INFINITY,
        label: current,
    });
    Ok(out)
}

/// Roots of `f` on `grid`: sign changes between neighbours (or exact zeros
/// at grid points) refined to `tol`, keeping only points with `|f| ≤ f_tol`
/// so that jump discontinuities are not mistaken for roots.
pub fn sign_change_roots<F: Fn(f64) -> f64>(f: F, grid: &[f64], tol: f64, f_tol: f64) -> Vec<f64> {
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for i in 0..grid.len() {
        if vals[i] == 0.0 {
            roots.push(grid[i]);
            continue;
        }
        if i + 1 < grid.len() && vals[i + 1] != 0.0 && vals[i].signum() != vals[i + 1].signum() {
            let (a, b) = bisect_predicate(|x| f(x) > 0.0, grid[i], grid[i + 1], tol);
            let (fa, fb) = (f(a), f(b));
            let r = if fa.abs() <= fb.abs() { a } else { b };
            if fa.abs().min(fb.abs()) <= f_tol {
                roots.push(r);
            }
        }
    }
    roots
}
