//! Monte Carlo coverage by inverse-CDF sampling.
//!
//! Draws are split into fixed-size chunks; chunk `k` uses a ChaCha8 stream
//! seeded with `seed` on stream `k`, so results depend only on `(seed, n)`
//! and not on the number of worker threads.

use super::{coverage_label, CoveragePoint};
use crate::distmodel::DistributionModel;
use crate::error::{require_finite, Error, Result};
use crate::posterior::PriorConfig;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const CHUNK: u64 = 1 << 16;

/// Uniform on the open interval `(0, 1)` from 53 random bits.
pub fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Runs `visit` on `n` draws `x = θ₀ + ε` in deterministic chunks and sums
/// the per-chunk accumulators in chunk order.
pub fn for_each_draw<A, F>(dist: &DistributionModel, theta0: f64, n: u64, seed: u64, visit: F) -> A
where
    A: Default + Send + std::ops::AddAssign,
    F: Fn(&mut A, f64) + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let len = CHUNK.min(n - k * CHUNK);
            let mut acc = A::default();
            for _ in 0..len {
                let x = theta0 + dist.quantile(open_unit(&mut rng));
                visit(&mut acc, x);
            }
            acc
        })
        .collect();
    let mut total = A::default();
    for p in parts {
        total += p;
    }
    total
}

#[derive(Debug, Default, Clone, Copy, PartialEq)]
struct Counts {
    member: u64,
    minus: u64,
    plus: u64,
    regimes: [u64; 4],
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, o: Self) {
        self.member += o.member;
        self.minus += o.minus;
        self.plus += o.plus;
        for i in 0..4 {
            self.regimes[i] += o.regimes[i];
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McCoverage {
    pub theta0: f64,
    pub c_hat: f64,
    /// Binomial standard error `sqrt(ĉ(1 − ĉ)/n)`.
    pub stderr: f64,
    pub c_minus_hat: f64,
    pub c_plus_hat: f64,
    pub regime_counts: [u64; 4],
    /// Draws with `θ₀ ∈ HPD(X)`.
    pub hits: u64,
    pub n: u64,
    pub seed: u64,
}

impl McCoverage {
    pub fn as_point(&self) -> CoveragePoint {
        let regime_fractions = if self.hits > 0 {
            self.regime_counts.map(|v| v as f64 / self.hits as f64)
        } else {
            [0.0; 4]
        };
        CoveragePoint {
            theta0: self.theta0,
            c: self.c_hat,
            c_minus: self.c_minus_hat,
            c_plus: self.c_plus_hat,
            regime_fractions,
        }
    }
}

pub fn coverage_mc(cfg: &PriorConfig, theta0: f64, n: u64, seed: u64) -> Result<McCoverage> {
    require_finite("theta0", theta0)?;
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "need at least one draw",
        });
    }
    let counts: Counts = for_each_draw(&cfg.dist, theta0, n, seed, |acc: &mut Counts, x| {
        let l = coverage_label(cfg, theta0, x);
        if let Some(r) = l.member {
            acc.member += 1;
            if r.index() < 4 {
                acc.regimes[r.index()] += 1;
            }
        }
        acc.minus += l.minus as u64;
        acc.plus += l.plus as u64;
    });
    let nf = n as f64;
    let c_hat = counts.member as f64 / nf;
    Ok(McCoverage {
        theta0,
        c_hat,
        stderr: (c_hat * (1.0 - c_hat) / nf).sqrt(),
        c_minus_hat: counts.minus as f64 / nf,
        c_plus_hat: counts.plus as f64 / nf,
        regime_counts: counts.regimes,
        hits: counts.member,
        n,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::coverage_exact;
    use crate::scan::ScanSettings;

    #[test]
    fn deterministic_and_unit_open() {
        let c = PriorConfig::new(DistributionModel::laplace(), 5.0, 1.0, 0.05).unwrap();
        let a = coverage_mc(&c, 6.0, 100_000, 7).unwrap();
        let b = coverage_mc(&c, 6.0, 100_000, 7).unwrap();
        assert_eq!(a, b);
        let d = coverage_mc(&c, 6.0, 100_000, 8).unwrap();
        assert_ne!(a.c_hat, d.c_hat);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let u = open_unit(&mut rng);
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn agrees_with_exact() {
        let c = PriorConfig::new(DistributionModel::gaussian(), 0.5, 0.25, 0.05).unwrap();
        for (i, t) in [0.7, 1.5, 4.0].into_iter().enumerate() {
            let e = coverage_exact(&c, t, &ScanSettings::default()).unwrap();
            let m = coverage_mc(&c, t, 200_000, 11 + i as u64).unwrap();
            assert!((e.c - m.c_hat).abs() <= 4.0 * m.stderr.max(1e-4), "{e:?} {m:?}");
        }
    }

    #[test]
    fn uniform_prior_within_three_sigma() {
        let c = PriorConfig::new(DistributionModel::laplace(), 0.0, 1.0, 0.05).unwrap();
        let m = coverage_mc(&c, 1.0, 1_000_000, 3).unwrap();
        assert!((m.c_hat - 0.95).abs() <= 3.0 * m.stderr);
    }
}
