//! Posterior under the θ-min prior `(1 − w) δ₀ + w 𝟏(|θ| > λ)`.
//!
//! All quantities are closed-form in `g` and `G`: the gap mass `Δ_λ`, the
//! rescaled normaliser `D`, the posterior atom `Π(0 | X)`, the threshold
//! `t_α` below which the atom alone carries `1 − α`, and posterior
//! probabilities of interval unions.

use crate::distmodel::DistributionModel;
use crate::error::{require_finite, Error, Result};
use crate::numeric::bisect;
use serde::Serialize;

/// Threshold `t_α` on `|x|` at or below which the HPD is `{0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum AtomThreshold {
    /// `Π(0 | X = 0) < 1 − α`: the atom never carries `1 − α` (`t_α = −∞`).
    Absent,
    Finite(f64),
    /// The atom keeps at least `1 − α` for every `|x|` up to the bracket limit.
    /// Flagged rather than treated as a regular value.
    Unbounded,
}

impl AtomThreshold {
    /// `|x| ≤ t_α`.
    pub fn covers(&self, x: f64) -> bool {
        match *self {
            AtomThreshold::Absent => false,
            AtomThreshold::Finite(t) => x.abs() <= t,
            AtomThreshold::Unbounded => true,
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            AtomThreshold::Absent => f64::NEG_INFINITY,
            AtomThreshold::Finite(t) => t,
            AtomThreshold::Unbounded => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            AtomThreshold::Finite(t) => Some(t),
            _ => None,
        }
    }
}

/// Bracket growth limit for `t_α`.
const T_ALPHA_BRACKET_LIMIT: f64 = 1e6;

/// Prior parameters `(λ, w)`, the level `α` and the error law.
///
/// `t_α` is solved once at construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriorConfig {
    pub dist: DistributionModel,
    pub lambda: f64,
    pub w: f64,
    pub alpha: f64,
    t_alpha: AtomThreshold,
}

impl PriorConfig {
    pub fn new(dist: DistributionModel, lambda: f64, w: f64, alpha: f64) -> Result<Self> {
        require_finite("lambda", lambda)?;
        require_finite("w", w)?;
        require_finite("alpha", alpha)?;
        if lambda < 0.0 {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
                reason: "must be non-negative",
            });
        }
        if !(w > 0.0 && w <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "w",
                value: w,
                reason: "must lie in (0, 1]",
            });
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "must lie in (0, 1)",
            });
        }
        let mut cfg = Self {
            dist,
            lambda,
            w,
            alpha,
            t_alpha: AtomThreshold::Absent,
        };
        cfg.t_alpha = solve_t_alpha(&cfg);
        Ok(cfg)
    }

    /// Same prior with a different credibility level.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.dist, self.lambda, self.w, alpha)
    }

    pub fn with_w(&self, w: f64) -> Result<Self> {
        Self::new(self.dist, self.lambda, w, self.alpha)
    }

    pub fn t_alpha(&self) -> AtomThreshold {
        self.t_alpha
    }

    /// `(1 − w) / w`.
    pub(crate) fn spike_ratio(&self) -> f64 {
        (1.0 - self.w) / self.w
    }
}

/// `Δ_λ(x) = G(λ − x) − G(−λ − x)`, the mass of `g(· − x)` on `[−λ, λ]`.
pub fn delta_lambda(cfg: &PriorConfig, x: f64) -> f64 {
    let a = x.abs();
    let d = &cfg.dist;
    if a <= cfg.lambda {
        1.0 - slab_mass(cfg, x)
    } else {
        d.prob_between(-cfg.lambda - a, cfg.lambda - a)
    }
}

/// `1 − Δ_λ(x) = G(x − λ) + G(−x − λ)`, computed without cancellation.
pub fn slab_mass(cfg: &PriorConfig, x: f64) -> f64 {
    let a = x.abs();
    cfg.dist.cdf(a - cfg.lambda) + cfg.dist.cdf(-a - cfg.lambda)
}

/// `D(x) = (1 − w)/w · g(x) + 1 − Δ_λ(x)`.
pub fn normaliser(cfg: &PriorConfig, x: f64) -> f64 {
    cfg.spike_ratio() * cfg.dist.density(x) + slab_mass(cfg, x)
}

/// `Π(0 | X = x)`; identically zero for `w = 1`.
pub fn point_mass(cfg: &PriorConfig, x: f64) -> f64 {
    if cfg.w == 1.0 {
        return 0.0;
    }
    let spike = cfg.spike_ratio() * cfg.dist.density(x);
    if spike == 0.0 {
        return 0.0;
    }
    spike / (spike + slab_mass(cfg, x))
}

/// Unique `t_α ≥ 0` with `Π(0 | X = t_α) = 1 − α`, by bisection on a
/// geometrically grown bracket.
pub fn solve_t_alpha(cfg: &PriorConfig) -> AtomThreshold {
    let level = 1.0 - cfg.alpha;
    if cfg.w == 1.0 || point_mass(cfg, 0.0) < level {
        return AtomThreshold::Absent;
    }
    let mut hi = 1.0;
    while point_mass(cfg, hi) >= level {
        hi *= 2.0;
        if hi > T_ALPHA_BRACKET_LIMIT {
            return AtomThreshold::Unbounded;
        }
    }
    let t = bisect(|x| point_mass(cfg, x) - level, 0.0, hi, 1e-11)
        .expect("bracket has a sign change by construction");
    AtomThreshold::Finite(t)
}

/// A closed interval `[lo, hi]`; endpoints may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn len(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Slab posterior mass of `[a, b] ∩ {|θ| > λ}`, unnormalised (before `/ D`).
fn slab_integral(cfg: &PriorConfig, x: f64, a: f64, b: f64) -> f64 {
    let lam = cfg.lambda;
    let mut total = 0.0;
    // left piece (-inf, -λ], right piece [λ, inf)
    let left = (a, b.min(-lam));
    let right = (a.max(lam), b);
    for (lo, hi) in [left, right] {
        if lo < hi {
            total += cfg.dist.prob_between(lo - x, hi - x);
        }
    }
    total
}

/// `Π(A | X = x)` where `A` is the union of `intervals` (restricted to the
/// slab support `|θ| > λ`) plus the atom at zero when `include_atom` is set.
pub fn posterior_prob(
    cfg: &PriorConfig,
    x: f64,
    intervals: &[Interval],
    include_atom: bool,
) -> Result<f64> {
    require_finite("x", x)?;
    let mut sorted: Vec<Interval> = intervals.iter().copied().filter(|i| !i.is_empty()).collect();
    sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    for pair in sorted.windows(2) {
        if pair[1].lo < pair[0].hi {
            return Err(Error::OverlappingIntervals(
                pair[0].lo, pair[0].hi, pair[1].lo, pair[1].hi,
            ));
        }
    }
    let d = normaliser(cfg, x);
    let slab: f64 = sorted.iter().map(|i| slab_integral(cfg, x, i.lo, i.hi)).sum();
    let atom = if include_atom { point_mass(cfg, x) } else { 0.0 };
    Ok(slab / d + atom)
}

/// Posterior density of the slab part at `θ` (zero on the gap).
pub fn slab_density(cfg: &PriorConfig, x: f64, theta: f64) -> f64 {
    if theta.abs() <= cfg.lambda && cfg.lambda > 0.0 {
        return 0.0;
    }
    cfg.dist.density(theta - x) / normaliser(cfg, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn laplace(lambda: f64, w: f64, alpha: f64) -> PriorConfig {
        PriorConfig::new(DistributionModel::laplace(), lambda, w, alpha).unwrap()
    }

    #[test]
    fn delta_closed_forms() {
        let cfg = laplace(2f64.ln(), 1.0, 0.05);
        assert!((delta_lambda(&cfg, 0.0) - 0.5).abs() < 1e-15);
        let cfg = laplace(5.0, 1.0, 0.05);
        assert!((delta_lambda(&cfg, 0.0) - (1.0 - (-5f64).exp())).abs() < 1e-15);
        assert!((delta_lambda(&cfg, 0.0) - 0.993_262).abs() < 1e-6);
        for i in 0..50 {
            let x = 0.37 * i as f64;
            assert_eq!(delta_lambda(&cfg, x), delta_lambda(&cfg, -x));
        }
    }

    #[test]
    fn point_mass_closed_form() {
        let cfg = laplace(0.5, 0.25, 0.05);
        // g(0) = 1/2, G(-0.5) = e^{-0.5}/2, (1-w)/w = 3
        let expected = 1.0 / (1.0 + (1.0 / 3.0) * 2.0 * (0.5 * (-0.5f64).exp()) / 0.5);
        assert!((point_mass(&cfg, 0.0) - expected).abs() < 1e-15);
        let slab_only = laplace(0.5, 1.0, 0.05);
        assert_eq!(point_mass(&slab_only, 0.3), 0.0);
        assert_eq!(slab_only.t_alpha(), AtomThreshold::Absent);
    }

    #[test]
    fn t_alpha_absent_in_laplace_condition() {
        // sufficient: λ < ln((1-α)/α · w/(1-w)); exact: 2wG(-λ)/((1-w)g(0)) > α/(1-α),
        // i.e. λ < ln(2(1-α)/α · w/(1-w)) for Laplace.
        let alpha: f64 = 0.05;
        let w: f64 = 0.5;
        assert!(w > (2.0 * alpha).sqrt());
        let sufficient = ((1.0 - alpha) / alpha * w / (1.0 - w)).ln();
        let exact = (2.0 * (1.0 - alpha) / alpha * w / (1.0 - w)).ln();
        let cfg = laplace(sufficient - 0.1, w, alpha);
        assert_eq!(cfg.t_alpha(), AtomThreshold::Absent);
        let cfg = laplace(exact - 1e-6, w, alpha);
        assert_eq!(cfg.t_alpha(), AtomThreshold::Absent);
        let cfg = laplace(exact + 1e-6, w, alpha);
        assert!(cfg.t_alpha().finite().is_some());
    }

    #[test]
    fn t_alpha_solves_level_equation() {
        let cfg = laplace(5.0, 0.125, 0.05);
        let t = cfg.t_alpha().finite().expect("finite threshold");
        assert!(t >= 0.0);
        assert!((point_mass(&cfg, t) - 0.95).abs() < 1e-9);
        assert!(cfg.t_alpha().covers(t - 1e-6));
        assert!(!cfg.t_alpha().covers(t + 1e-6));
    }

    #[test]
    fn t_alpha_unbounded_is_flagged() {
        let cfg = PriorConfig::new(DistributionModel::student_t3(), 0.5, 1e-30, 0.05).unwrap();
        assert_eq!(cfg.t_alpha(), AtomThreshold::Unbounded);
    }

    #[test]
    fn posterior_prob_edge_cases() {
        let cfg = laplace(0.5, 0.25, 0.05);
        let all = [Interval::new(f64::NEG_INFINITY, f64::INFINITY)];
        for &x in &[-3.0, 0.0, 0.7, 4.0] {
            assert!((posterior_prob(&cfg, x, &all, true).unwrap() - 1.0).abs() < 1e-12);
            let gap = [Interval::new(-0.5, 0.5)];
            assert_eq!(posterior_prob(&cfg, x, &gap, false).unwrap(), 0.0);
        }
        let overlapping = [Interval::new(0.0, 2.0), Interval::new(1.0, 3.0)];
        assert!(posterior_prob(&cfg, 1.0, &overlapping, false).is_err());
    }

    #[test]
    fn posterior_prob_figure_two_ratio() {
        let cfg = PriorConfig::new(DistributionModel::gaussian(), 0.5, 1.0, 0.05).unwrap();
        let g = DistributionModel::gaussian();
        let x = 1.25;
        let got = posterior_prob(&cfg, x, &[Interval::new(0.5, f64::INFINITY)], false).unwrap();
        // G(θ - x) over [0.5, ∞) is 1 - G(-0.75) = G(0.75)
        let delta = g.cdf(0.5 - x) - g.cdf(-0.5 - x);
        let expected = g.cdf(0.75) / (1.0 - delta);
        assert!((got - expected).abs() < 1e-14);
    }

    #[test]
    fn normaliser_positive() {
        let cfg = PriorConfig::new(DistributionModel::gaussian(), 5.0, 1.0, 0.05).unwrap();
        for i in -100..=100 {
            assert!(normaliser(&cfg, 0.1 * i as f64) > 0.0);
        }
    }

    #[test]
    fn point_mass_nonincreasing_on_bundled_configs() {
        for d in [
            DistributionModel::gaussian(),
            DistributionModel::laplace(),
            DistributionModel::student_t3(),
        ] {
            for &lambda in &[0.5, 5.0] {
                for &w in &[0.125, 0.25, 0.5, 1.0] {
                    let cfg = PriorConfig::new(d, lambda, w, 0.05).unwrap();
                    let mut prev = point_mass(&cfg, 0.0);
                    for i in 1..1000 {
                        let h = point_mass(&cfg, 0.02 * i as f64);
                        assert!(h <= prev, "{d} λ={lambda} w={w}");
                        prev = h;
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn posterior_prob_is_additive(
            x in -8.0f64..8.0,
            a in -10.0f64..10.0,
            len1 in 0.0f64..4.0,
            gap in 0.0f64..3.0,
            len2 in 0.0f64..4.0,
            w in 0.1f64..1.0,
        ) {
            let cfg = laplace(1.0, w, 0.05);
            let i1 = Interval::new(a, a + len1);
            let i2 = Interval::new(a + len1 + gap, a + len1 + gap + len2);
            let joint = posterior_prob(&cfg, x, &[i1, i2], false).unwrap();
            let sep = posterior_prob(&cfg, x, &[i1], false).unwrap()
                + posterior_prob(&cfg, x, &[i2], false).unwrap();
            prop_assert!((joint - sep).abs() <= 1e-12);
        }

        #[test]
        fn point_mass_is_even(x in -20.0f64..20.0, w in 0.05f64..0.99) {
            let cfg = laplace(0.8, w, 0.1);
            prop_assert_eq!(point_mass(&cfg, x), point_mass(&cfg, -x));
        }
    }
}
