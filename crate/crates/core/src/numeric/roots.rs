//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Bisection for a sign change of `f` on `[lo, hi]`.
///
/// Requires `f(lo)` and `f(hi)` to have opposite signs (or one of them to be
/// zero). Stops once the bracket is narrower than `x_tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::InvalidParameter {
            name: "bracket",
            value: lo,
            reason: "function has the same sign at both ends",
        });
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= x_tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Locates the point where a boolean predicate flips between `lo` and `hi`.
///
/// `pred(lo) != pred(hi)` is assumed; the returned pair `(a, b)` satisfies
/// `b - a <= x_tol` with `pred(a) == pred(lo)` and `pred(b) == pred(hi)`.
pub fn bisect_predicate<T: PartialEq, F: Fn(f64) -> T>(
    pred: F,
    mut lo: f64,
    mut hi: f64,
    x_tol: f64,
) -> (f64, f64) {
    let left = pred(lo);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= x_tol || mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) == left {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Solves `f(x) = target` for increasing `f` with derivative `df` by
/// Newton steps safeguarded with bisection on the bracket `[lo, hi]`.
///
/// Stops when `|f(x) - target| <= f_tol` or the bracket collapses below
/// relative width `1e-15`, and gives up after `max_iter` iterations.
pub fn newton_bracketed<F, D>(
    f: F,
    df: D,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    f_tol: f64,
    max_iter: usize,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut x = 0.5 * (lo + hi);
    for _ in 0..max_iter {
        let fx = f(x) - target;
        if fx.abs() <= f_tol {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 1e-15 * (1.0 + x.abs()) {
            return Ok(x);
        }
        let d = df(x);
        let newton = x - fx / d;
        x = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NonConvergence {
        what: "bracketed Newton",
        iterations: max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn bisect_rejects_bad_bracket() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn predicate_flip() {
        let (a, b) = bisect_predicate(|x| x > 0.3, 0.0, 1.0, 1e-12);
        assert!(a <= 0.3 && b > 0.3 && b - a <= 1e-12);
    }

    #[test]
    fn newton_cube_root() {
        let r = newton_bracketed(|x| x * x * x, |x| 3.0 * x * x, 27.0, 0.0, 10.0, 1e-13, 200)
            .unwrap();
        assert!((r - 3.0).abs() < 1e-13);
    }
}
