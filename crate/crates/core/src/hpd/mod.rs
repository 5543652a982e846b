//! Closed-form HPD sets for the θ-min prior.
//!
//! For `|x| > t_α` the HPD is `[L(x), U(x)] \ (−λ, λ)`, plus the atom at zero
//! when `w < 1`. `U` is `x + R₁`, `x + R₂`, `x + R₃` or `−λ` depending on
//! which of the four regimes `x` falls in, and `L(x) = −U(−x)`.
//!
//! The `R` functions are evaluated through their upper tail masses, i.e.
//! `R_j(x) = G⁻¹(1 − q_j(x))`, which keeps small tail probabilities exact.

pub mod inverse;
pub mod ms;

use crate::error::{require_finite, Error, Result};
use crate::extreal::ExtReal;
use crate::posterior::{delta_lambda, slab_mass, Interval, PriorConfig};
use serde::Serialize;
use std::fmt;

pub use inverse::{inf_lower_inverse_fixedpoint, invert_lower, invert_upper, InverseSet};
pub use ms::{ms_lower, ms_upper};

/// Which closed form of `U` applies at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RegimeLabel {
    I,
    II,
    III,
    IV,
    /// `|x| ≤ t_α`: the HPD is `{0}`.
    Atom,
}

impl RegimeLabel {
    pub const INTERVALS: [RegimeLabel; 4] =
        [RegimeLabel::I, RegimeLabel::II, RegimeLabel::III, RegimeLabel::IV];

    pub fn index(self) -> usize {
        match self {
            RegimeLabel::I => 0,
            RegimeLabel::II => 1,
            RegimeLabel::III => 2,
            RegimeLabel::IV => 3,
            RegimeLabel::Atom => 4,
        }
    }
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegimeLabel::I => "I",
            RegimeLabel::II => "II",
            RegimeLabel::III => "III",
            RegimeLabel::IV => "IV",
            RegimeLabel::Atom => "ATOM",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RValues {
    pub r1: ExtReal,
    pub r2: ExtReal,
    pub r3: ExtReal,
}

/// Upper tail masses `(q₁, q₂, q₃)` with `R_j = G⁻¹(1 − q_j)`.
pub fn r_tail_masses(cfg: &PriorConfig, x: f64) -> (f64, f64, f64) {
    let a = cfg.alpha;
    let d = &cfg.dist;
    let spike = cfg.spike_ratio() * a * d.density(x);
    let delta = delta_lambda(cfg, x);
    let q1 = 0.5 * a + 0.5 * spike + 0.5 * (1.0 - a) * delta;
    let q2 = a * d.cdf(x - cfg.lambda) + spike - (1.0 - a) * d.cdf(-x - cfg.lambda);
    let q3 = 0.5 * a * slab_mass(cfg, x) + 0.5 * spike;
    (q1, q2, q3)
}

/// `R₁(x)`, `R₂(x)`, `R₃(x)` with `G⁻¹(p) = +∞` for `p ≥ 1` and `−∞` for `p ≤ 0`.
pub fn r_functions(cfg: &PriorConfig, x: f64) -> RValues {
    let (q1, q2, q3) = r_tail_masses(cfg, x);
    let d = &cfg.dist;
    RValues {
        r1: d.upper_quantile(q1),
        r2: d.upper_quantile(q2),
        r3: d.upper_quantile(q3),
    }
}

fn finite_r(r: ExtReal, which: &'static str) -> f64 {
    r.finite()
        .unwrap_or_else(|| panic!("{which} must be finite outside the atom region"))
}

/// Regime from precomputed `R₁(x)`, `R₃(x)` (both even in `x`).
fn regime_from(cfg: &PriorConfig, x: f64, r1: f64, r3: f64) -> RegimeLabel {
    let lam = cfg.lambda;
    if x.abs() > lam + r1 {
        RegimeLabel::I
    } else if -lam + r3 < x && x <= lam + r1 {
        RegimeLabel::II
    } else if x.abs() <= -lam + r3 {
        RegimeLabel::III
    } else {
        RegimeLabel::IV
    }
}

pub fn classify(cfg: &PriorConfig, x: f64) -> RegimeLabel {
    if cfg.t_alpha().covers(x) {
        return RegimeLabel::Atom;
    }
    let r = r_functions(cfg, x);
    regime_from(cfg, x, finite_r(r.r1, "R1"), finite_r(r.r3, "R3"))
}

fn check_outside_atom(cfg: &PriorConfig, x: f64) -> Result<()> {
    require_finite("x", x)?;
    if cfg.t_alpha().covers(x) {
        return Err(Error::AtomRegion { x });
    }
    Ok(())
}

/// `U(x)` and its regime, assuming `|x| > t_α`.
fn upper_unchecked(cfg: &PriorConfig, x: f64) -> (f64, RegimeLabel) {
    let r = r_functions(cfg, x);
    let r1 = finite_r(r.r1, "R1");
    let r3 = finite_r(r.r3, "R3");
    let regime = regime_from(cfg, x, r1, r3);
    let u = match regime {
        RegimeLabel::I => x + r1,
        // R₁ ≤ R₂ < R₃ on regime II; the clamp only absorbs rounding
        RegimeLabel::II => x + r.r2.max(ExtReal::Finite(r1)).min(ExtReal::Finite(r3)).to_f64(),
        RegimeLabel::III => x + r3,
        RegimeLabel::IV => -cfg.lambda,
        RegimeLabel::Atom => unreachable!(),
    };
    (u, regime)
}

/// Upper endpoint `U(x)` of the interval part of the HPD.
pub fn upper(cfg: &PriorConfig, x: f64) -> Result<f64> {
    check_outside_atom(cfg, x)?;
    Ok(upper_unchecked(cfg, x).0)
}

/// Lower endpoint `L(x) = −U(−x)`.
pub fn lower(cfg: &PriorConfig, x: f64) -> Result<f64> {
    check_outside_atom(cfg, x)?;
    Ok(-upper_unchecked(cfg, -x).0)
}

/// `(L(x), U(x), regime)` for `|x| > t_α`; `None` inside the atom region.
pub fn endpoints(cfg: &PriorConfig, x: f64) -> Option<(f64, f64, RegimeLabel)> {
    if cfg.t_alpha().covers(x) {
        return None;
    }
    let (u, regime) = upper_unchecked(cfg, x);
    let (neg_u, _) = upper_unchecked(cfg, -x);
    Some((-neg_u, u, regime))
}

/// `U(x)` through `H₁ = x + (R₂ ∧ R₃) ∨ R₁` and `H₂ = −λ ∧ (x + R₁)`:
/// `H₁` when `H₁ ≥ λ`, else `H₂`.
pub fn upper_alt(cfg: &PriorConfig, x: f64) -> Result<f64> {
    check_outside_atom(cfg, x)?;
    let r = r_functions(cfg, x);
    let h1 = r.r2.min(r.r3).max(r.r1).shift(x);
    let h2 = (-cfg.lambda).min(x + finite_r(r.r1, "R1"));
    if h1 >= ExtReal::Finite(cfg.lambda) {
        Ok(h1.to_f64())
    } else {
        Ok(h2)
    }
}

/// An HPD credible set: up to two closed intervals avoiding `(−λ, λ)`,
/// plus optionally the atom at zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CredibleSet {
    pub atom_included: bool,
    pub intervals: Vec<Interval>,
    pub regime: RegimeLabel,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl CredibleSet {
    pub fn contains(&self, theta: f64) -> bool {
        (self.atom_included && theta == 0.0) || self.intervals.iter().any(|i| i.contains(theta))
    }

    /// Total length of the interval part.
    pub fn length(&self) -> f64 {
        self.intervals.iter().map(Interval::len).sum()
    }
}

/// `[l, u] \ (−λ, λ)` as a sorted list of at most two intervals.
pub fn remove_gap(l: f64, u: f64, lambda: f64) -> Vec<Interval> {
    if l > u {
        return Vec::new();
    }
    if lambda == 0.0 {
        return vec![Interval::new(l, u)];
    }
    let mut out = Vec::with_capacity(2);
    if l <= -lambda {
        out.push(Interval::new(l, u.min(-lambda)));
    }
    if u >= lambda {
        out.push(Interval::new(l.max(lambda), u));
    }
    out
}

pub fn hpd_set(cfg: &PriorConfig, x: f64) -> Result<CredibleSet> {
    require_finite("x", x)?;
    let atom_included = cfg.w < 1.0;
    match endpoints(cfg, x) {
        None => Ok(CredibleSet {
            atom_included,
            intervals: Vec::new(),
            regime: RegimeLabel::Atom,
            lower: None,
            upper: None,
        }),
        Some((l, u, regime)) => Ok(CredibleSet {
            atom_included,
            intervals: remove_gap(l, u, cfg.lambda),
            regime,
            lower: Some(l),
            upper: Some(u),
        }),
    }
}

/// Lebesgue measure of the interval part of the HPD; zero on the atom region.
pub fn hpd_length(cfg: &PriorConfig, x: f64) -> Result<f64> {
    require_finite("x", x)?;
    if cfg.t_alpha().covers(x) {
        return Ok(0.0);
    }
    let lam = cfg.lambda;
    let r = r_functions(cfg, x);
    let r1 = finite_r(r.r1, "R1");
    let r3 = finite_r(r.r3, "R3");
    let clamp_r2 = |r2: ExtReal| r2.max(ExtReal::Finite(r1)).min(ExtReal::Finite(r3)).to_f64();
    let len = match regime_from(cfg, x, r1, r3) {
        RegimeLabel::I => 2.0 * r1,
        RegimeLabel::II => clamp_r2(r.r2) + x - lam,
        RegimeLabel::III => 2.0 * r3 - 2.0 * lam,
        RegimeLabel::IV => clamp_r2(r_functions(cfg, -x).r2) - x - lam,
        RegimeLabel::Atom => unreachable!(),
    };
    Ok(len.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distmodel::DistributionModel;
    use crate::posterior::posterior_prob;
    use proptest::prelude::*;

    fn cfg(d: DistributionModel, lambda: f64, w: f64) -> PriorConfig {
        PriorConfig::new(d, lambda, w, 0.05).unwrap()
    }

    fn bundled() -> Vec<PriorConfig> {
        let mut v = Vec::new();
        for d in [
            DistributionModel::gaussian(),
            DistributionModel::laplace(),
            DistributionModel::student_t3(),
        ] {
            for lambda in [0.5, 5.0] {
                for w in [0.125, 0.25, 1.0] {
                    v.push(cfg(d, lambda, w));
                }
            }
        }
        v
    }

    #[test]
    fn uniform_prior_r1_is_nominal_quantile() {
        let c = cfg(DistributionModel::laplace(), 0.0, 1.0);
        for x in [-7.0, -0.3, 0.0, 2.0, 11.0] {
            let r = r_functions(&c, x);
            assert!((r.r1.to_f64() - 20f64.ln()).abs() < 1e-12);
            let l = lower(&c, x).unwrap();
            let u = upper(&c, x).unwrap();
            assert!((u - x - 20f64.ln()).abs() < 1e-12);
            assert!((x - l - 20f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn r1_r3_even_and_ordered() {
        for c in bundled() {
            for i in 0..200 {
                let x = -12.0 + 0.12 * i as f64 + 0.003;
                if c.t_alpha().covers(x) {
                    continue;
                }
                let a = r_functions(&c, x);
                let b = r_functions(&c, -x);
                assert_eq!(a.r1, b.r1);
                assert_eq!(a.r3, b.r3);
                let (r1, r3) = (a.r1.to_f64(), a.r3.to_f64());
                assert!(0.0 < r1 && r1 <= r3 && r3.is_finite(), "{c:?} x={x}");
            }
        }
    }

    #[test]
    fn far_out_is_regime_one() {
        for c in bundled() {
            let edge = c.lambda + c.dist.quantile(1.0 - c.alpha / 2.0);
            for x in [edge, edge + 0.5, -edge - 3.0] {
                assert_eq!(classify(&c, x), RegimeLabel::I);
            }
        }
    }

    #[test]
    fn origin_is_regime_three_without_atom_threshold() {
        for c in bundled() {
            if c.t_alpha() == crate::posterior::AtomThreshold::Absent {
                assert_eq!(classify(&c, 0.0), RegimeLabel::III, "{c:?}");
            }
        }
    }

    #[test]
    fn laplace_window_is_regime_two() {
        let c = cfg(DistributionModel::laplace(), 5.0, 1.0);
        let lo = 0.5 * 40f64.ln();
        for i in 1..100 {
            let x = lo + (5.0 - lo) * i as f64 / 100.0;
            assert_eq!(classify(&c, x), RegimeLabel::II, "x={x}");
            assert_eq!(classify(&c, -x), RegimeLabel::IV, "x={x}");
            assert_eq!(upper(&c, -x).unwrap(), -5.0);
        }
    }

    #[test]
    fn atom_region_rejected() {
        let c = cfg(DistributionModel::laplace(), 5.0, 0.125);
        let t = c.t_alpha().finite().unwrap();
        assert!(matches!(upper(&c, 0.5 * t), Err(Error::AtomRegion { .. })));
        assert_eq!(hpd_length(&c, 0.5 * t).unwrap(), 0.0);
        let s = hpd_set(&c, -0.5 * t).unwrap();
        assert_eq!(s.regime, RegimeLabel::Atom);
        assert!(s.atom_included && s.intervals.is_empty());
        assert!(s.contains(0.0) && !s.contains(1e-3));
    }

    #[test]
    fn alternative_formula_agrees() {
        for c in bundled() {
            for i in 0..2000 {
                let x = -15.0 + 30.0 * (i as f64 + 0.5) / 2000.0;
                if c.t_alpha().covers(x) {
                    continue;
                }
                let u = upper(&c, x).unwrap();
                let a = upper_alt(&c, x).unwrap();
                assert!((u - a).abs() <= 1e-10, "{c:?} x={x} {u} {a}");
            }
        }
    }

    #[test]
    fn credibility_and_lengths() {
        for c in bundled() {
            for i in 0..300 {
                let x = -14.0 + 28.0 * (i as f64 + 0.37) / 300.0;
                if c.t_alpha().covers(x) {
                    continue;
                }
                let s = hpd_set(&c, x).unwrap();
                let p = posterior_prob(&c, x, &s.intervals, s.atom_included).unwrap();
                assert!((p - 0.95).abs() < 1e-8, "{c:?} x={x} p={p} {s:?}");
                let len = hpd_length(&c, x).unwrap();
                assert!((len - s.length()).abs() < 1e-12, "{c:?} x={x}");
                for iv in &s.intervals {
                    assert!(iv.lo >= c.lambda || iv.hi <= -c.lambda);
                }
            }
        }
    }

    #[test]
    fn regime_three_splits_in_two() {
        let c = cfg(DistributionModel::gaussian(), 0.5, 1.0);
        let s = hpd_set(&c, 0.0).unwrap();
        assert_eq!(s.regime, RegimeLabel::III);
        assert_eq!(s.intervals.len(), 2);
        assert_eq!(s.intervals[0].hi, -0.5);
        assert_eq!(s.intervals[1].lo, 0.5);
        assert!(!s.atom_included);
    }

    #[test]
    fn nominal_length_without_gap() {
        let c = cfg(DistributionModel::gaussian(), 0.0, 1.0);
        let nominal = 2.0 * c.dist.quantile(0.975);
        for x in [-3.0, 0.0, 0.4, 8.0] {
            assert!((hpd_length(&c, x).unwrap() - nominal).abs() < 1e-12);
        }
    }

    #[test]
    fn smaller_w_gives_nested_sets() {
        for d in [DistributionModel::gaussian(), DistributionModel::laplace()] {
            for lambda in [0.5, 5.0] {
                let small = cfg(d, lambda, 0.125);
                let big = cfg(d, lambda, 0.5);
                for i in 0..200 {
                    let x = -12.0 + 24.0 * (i as f64 + 0.5) / 200.0;
                    if small.t_alpha().covers(x) {
                        continue;
                    }
                    let (ls, us, _) = endpoints(&small, x).unwrap();
                    let (lb, ub, _) = endpoints(&big, x).unwrap();
                    assert!(lb <= ls + 1e-9 && us <= ub + 1e-9, "x={x}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn reflection_identity(x in -20.0f64..20.0, idx in 0usize..18) {
            let c = bundled()[idx];
            prop_assume!(!c.t_alpha().covers(x));
            let l = lower(&c, x).unwrap();
            let u = upper(&c, -x).unwrap();
            prop_assert_eq!(l + u, 0.0);
        }

        #[test]
        fn sign_equivalence(x in -20.0f64..20.0, idx in 0usize..18) {
            let c = bundled()[idx];
            prop_assume!(!c.t_alpha().covers(x));
            let r = r_functions(&c, x);
            let (r1, r3) = (r.r1.to_f64(), r.r3.to_f64());
            let a = c.lambda + r1 - x;
            let b = r3 - x - c.lambda;
            // sign of R₂ − r with R₂ possibly infinite, zero inside the dead-band
            let sign_vs = |rv: f64| match r.r2 {
                ExtReal::Finite(v) if (v - rv).abs() <= 1e-9 => 0.0,
                ExtReal::Finite(v) => (v - rv).signum(),
                ExtReal::PosInf => 1.0,
                ExtReal::NegInf => -1.0,
            };
            if a.abs() > 1e-9 {
                let s = sign_vs(r1);
                prop_assert!(s == 0.0 || s == a.signum(), "x={} a={} R={:?}", x, a, r);
            }
            if b.abs() > 1e-9 {
                let s = sign_vs(r3);
                prop_assert!(s == 0.0 || s == b.signum(), "x={} b={} R={:?}", x, b, r);
            }
        }
    }
}
