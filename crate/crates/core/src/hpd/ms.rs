//! One-sided HPD under the prior `𝟏(θ > λ)`.
//!
//! The posterior is `g(θ − x)` truncated to `(λ, ∞)`. Its HPD is the
//! symmetric interval `x ± R₁^MS(x)` when that stays above `λ`, and
//! `[λ, x + R₂^MS(x)]` otherwise, with
//! `R₁^MS = G⁻¹(½ + (1 − α)/2 · G(x − λ))` and `R₂^MS = G⁻¹(1 − α G(x − λ))`.

use crate::error::{require_finite, Error, Result};
use crate::posterior::PriorConfig;

fn require_slab_only(cfg: &PriorConfig) -> Result<()> {
    if cfg.w != 1.0 {
        return Err(Error::RequiresSlabOnly(cfg.w));
    }
    Ok(())
}

/// `(R₁^MS(x), R₂^MS(x))`.
pub fn ms_r_functions(cfg: &PriorConfig, x: f64) -> (f64, f64) {
    let d = &cfg.dist;
    let a = cfg.alpha;
    let q1 = 0.5 * a + 0.5 * (1.0 - a) * d.cdf(cfg.lambda - x);
    let q2 = a * d.cdf(x - cfg.lambda);
    (d.upper_quantile(q1).to_f64(), d.upper_quantile(q2).to_f64())
}

pub fn ms_upper(cfg: &PriorConfig, x: f64) -> Result<f64> {
    require_slab_only(cfg)?;
    require_finite("x", x)?;
    let (r1, r2) = ms_r_functions(cfg, x);
    Ok(x + r1.max(r2))
}

/// Lower end: `x − R₁^MS(x)` when the symmetric interval clears `λ`, else `λ`.
pub fn ms_lower(cfg: &PriorConfig, x: f64) -> Result<f64> {
    require_slab_only(cfg)?;
    require_finite("x", x)?;
    let (r1, _) = ms_r_functions(cfg, x);
    Ok((x - r1).max(cfg.lambda))
}

/// `(L^MS(x), U^MS(x))`.
pub fn ms_endpoints(cfg: &PriorConfig, x: f64) -> Result<(f64, f64)> {
    Ok((ms_lower(cfg, x)?, ms_upper(cfg, x)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distmodel::DistributionModel;
    use crate::hpd::{endpoints, RegimeLabel};

    fn laplace(lambda: f64) -> PriorConfig {
        PriorConfig::new(DistributionModel::laplace(), lambda, 1.0, 0.05).unwrap()
    }

    /// Posterior mass of `[l, u]` under the truncated posterior.
    fn ms_mass(cfg: &PriorConfig, x: f64, l: f64, u: f64) -> f64 {
        let d = &cfg.dist;
        d.prob_between(l - x, u - x) / d.sf(cfg.lambda - x)
    }

    #[test]
    fn level_and_equal_density() {
        for lambda in [0.5, 5.0] {
            let c = laplace(lambda);
            for i in 0..200 {
                let x = -3.0 + 0.1 * i as f64;
                let (l, u) = ms_endpoints(&c, x).unwrap();
                assert!(l >= lambda && u > l);
                assert!((ms_mass(&c, x, l, u) - 0.95).abs() < 1e-9, "x={x}");
                if l > lambda {
                    let g = &c.dist;
                    assert!((g.density(l - x) - g.density(u - x)).abs() < 1e-12);
                } else {
                    assert!(c.dist.density(u - x) <= c.dist.density(lambda - x) + 1e-15);
                }
            }
        }
    }

    #[test]
    fn limits() {
        let c = laplace(0.5);
        let nominal = 20f64.ln();
        assert!((ms_upper(&c, 60.0).unwrap() - 60.0 - nominal).abs() < 1e-9);
        let (_, r2) = ms_r_functions(&c, 0.5);
        assert!((r2 - nominal).abs() < 1e-12);
    }

    #[test]
    fn rejects_atom() {
        let c = PriorConfig::new(DistributionModel::laplace(), 0.5, 0.5, 0.05).unwrap();
        assert!(matches!(ms_upper(&c, 1.0), Err(Error::RequiresSlabOnly(_))));
    }

    #[test]
    fn contained_in_two_sided_set() {
        for lambda in [0.5, 5.0] {
            let c = laplace(lambda);
            for i in 0..400 {
                let x = 0.03 * i as f64 + 0.01;
                let (_, _, regime) = endpoints(&c, x).unwrap();
                if !matches!(regime, RegimeLabel::I | RegimeLabel::II) {
                    continue;
                }
                let (l, u, _) = endpoints(&c, x).unwrap();
                let (ml, mu) = ms_endpoints(&c, x).unwrap();
                assert!(l <= ml + 1e-12 && mu <= u + 1e-12, "x={x}");
            }
        }
    }
}
