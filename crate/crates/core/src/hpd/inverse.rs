//! Set-valued inverses `U⁻¹(θ₀)` and `L⁻¹(θ₀)` over `{|x| > t_α}`.
//!
//! `U` and `L` are neither monotone nor continuous, so the inverse is found
//! by scanning for sign changes of `U(x) − θ₀` and discarding those that
//! turn out to be jumps.

use super::{endpoints, r_functions, RegimeLabel};
use crate::error::{require_finite, Error, Result};
use crate::posterior::PriorConfig;
use crate::scan::{build_grid, sign_change_roots, ScanSettings};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InverseSet {
    pub roots: Vec<f64>,
    pub inf: f64,
    pub sup: f64,
    pub regimes: Vec<RegimeLabel>,
}

#[derive(Clone, Copy)]
enum Side {
    Lower,
    Upper,
}

/// Half-width of the scan for target `θ₀`.
pub fn scan_half_width(cfg: &PriorConfig, theta0: f64, settings: &ScanSettings) -> f64 {
    theta0.abs() + cfg.dist.quantile(1.0 - settings.tol_tail) + cfg.lambda
}

fn invert(cfg: &PriorConfig, theta0: f64, settings: &ScanSettings, side: Side) -> Result<InverseSet> {
    require_finite("theta0", theta0)?;
    settings.validate()?;
    let b = scan_half_width(cfg, theta0, settings);
    let t = cfg.t_alpha();
    let mut grid = build_grid(cfg, -b, b, settings, &[theta0, -theta0]);
    grid.retain(|&x| !t.covers(x));
    if let Some(tv) = t.finite() {
        // first admissible points just outside the atom region
        let eps = 1e-12 * (1.0 + tv);
        grid.extend([tv + eps, -tv - eps]);
        grid = crate::scan::finish_grid(grid);
    }
    let target = |x: f64| -> f64 {
        match endpoints(cfg, x) {
            Some((l, u, _)) => match side {
                Side::Lower => l - theta0,
                Side::Upper => u - theta0,
            },
            None => f64::NAN,
        }
    };
    // split the grid at the atom region so no sign change straddles it
    let mut roots = Vec::new();
    let split = grid.partition_point(|&x| x < 0.0);
    let pieces: Vec<&[f64]> = if t.finite().is_some() {
        vec![&grid[..split], &grid[split..]]
    } else {
        vec![&grid[..]]
    };
    for piece in pieces {
        roots.extend(sign_change_roots(target, piece, settings.root_tol, 1e-8));
    }
    roots.retain(|r| !t.covers(*r));
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    if roots.is_empty() {
        return Err(Error::EmptyInverse {
            target: theta0,
            reason: "no crossing found in the scanned range",
        });
    }
    let regimes = roots.iter().map(|&r| super::classify(cfg, r)).collect();
    Ok(InverseSet {
        inf: roots[0],
        sup: *roots.last().unwrap(),
        roots,
        regimes,
    })
}

/// `U⁻¹(θ₀) = {x : |x| > t_α, U(x) = θ₀}`.
pub fn invert_upper(cfg: &PriorConfig, theta0: f64, settings: &ScanSettings) -> Result<InverseSet> {
    invert(cfg, theta0, settings, Side::Upper)
}

/// `L⁻¹(θ₀) = {x : |x| > t_α, L(x) = θ₀}`.
pub fn invert_lower(cfg: &PriorConfig, theta0: f64, settings: &ScanSettings) -> Result<InverseSet> {
    invert(cfg, theta0, settings, Side::Lower)
}

/// `inf L⁻¹(θ₀)` as the limit of `a₀ = θ₀`, `a_{k+1} = θ₀ + R₁(a_k)`.
///
/// Requires `θ₀ > max(λ, t_α)`. The iterates increase monotonically; a
/// decrease beyond rounding is reported as an error.
pub fn inf_lower_inverse_fixedpoint(cfg: &PriorConfig, theta0: f64) -> Result<f64> {
    require_finite("theta0", theta0)?;
    let floor = cfg.lambda.max(cfg.t_alpha().value());
    if theta0 <= floor {
        return Err(Error::InvalidParameter {
            name: "theta0",
            value: theta0,
            reason: "must exceed max(lambda, t_alpha)",
        });
    }
    const MAX_ITER: usize = 10_000;
    let mut a = theta0;
    for step in 0..MAX_ITER {
        let r1 = r_functions(cfg, a)
            .r1
            .finite()
            .expect("R1 is finite outside the atom region");
        let next = theta0 + r1;
        if next < a - 1e-12 * (1.0 + a.abs()) {
            return Err(Error::NonMonotoneIterates {
                step,
                prev: a,
                next,
            });
        }
        if (next - a).abs() <= 1e-12 {
            return Ok(next);
        }
        a = next;
    }
    Err(Error::NonConvergence {
        what: "fixed-point iteration for inf L^-1",
        iterations: MAX_ITER,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distmodel::DistributionModel;
    use crate::hpd::{lower, upper};

    fn laplace(lambda: f64, w: f64) -> PriorConfig {
        PriorConfig::new(DistributionModel::laplace(), lambda, w, 0.05).unwrap()
    }

    fn coarse() -> ScanSettings {
        ScanSettings {
            n: 1024,
            dense_extra: 256,
            ..ScanSettings::default()
        }
    }

    #[test]
    fn shift_map_inverse() {
        let c = laplace(0.0, 1.0);
        let inv = invert_upper(&c, 1.7, &coarse()).unwrap();
        assert_eq!(inv.roots.len(), 1);
        assert!((inv.inf - (1.7 - 20f64.ln())).abs() < 1e-9);
        let fp = inf_lower_inverse_fixedpoint(&c, 1.7).unwrap();
        assert!((fp - (1.7 + 20f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn lower_inverse_lies_in_regime_one() {
        let c = laplace(5.0, 1.0);
        for theta0 in [5.2, 6.0, 9.0] {
            let inv = invert_lower(&c, theta0, &coarse()).unwrap();
            assert!(inv.regimes.iter().all(|r| *r == RegimeLabel::I), "{inv:?}");
            for r in &inv.roots {
                assert!((lower(&c, *r).unwrap() - theta0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn non_monotone_upper_has_several_roots() {
        let c = laplace(5.0, 1.0);
        let inv = invert_upper(&c, 8.2, &coarse()).unwrap();
        assert!(inv.roots.len() >= 2, "{inv:?}");
        for r in &inv.roots {
            assert!((upper(&c, *r).unwrap() - 8.2).abs() < 1e-8);
        }
    }

    #[test]
    fn fixed_point_matches_scan() {
        let c = laplace(5.0, 1.0);
        for theta0 in [5.01, 5.5, 7.0, 12.0] {
            let fp = inf_lower_inverse_fixedpoint(&c, theta0).unwrap();
            assert!((lower(&c, fp).unwrap() - theta0).abs() < 1e-8);
            let inv = invert_lower(&c, theta0, &coarse()).unwrap();
            assert!((inv.inf - fp).abs() < 1e-6, "{theta0}: {} vs {fp}", inv.inf);
        }
    }

    #[test]
    fn fixed_point_requires_theta_above_gap() {
        let c = laplace(5.0, 1.0);
        assert!(inf_lower_inverse_fixedpoint(&c, 4.0).is_err());
    }
}
