//! Bracketed scalar root finding.

use crate::error::{Error, Result};

pub const MAX_BISECTIONS: usize = 200;
pub const X_TOL: f64 = 1e-13;
pub const MAX_DOUBLINGS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub x: f64,
    /// `f(x)`.
    pub residual: f64,
    /// Final bracket.
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Bisection on `[lo, hi]`; `f(lo)` and `f(hi)` must differ in sign (or vanish).
///
/// Stops once the bracket is narrower than `x_tol` or after `max_iter` halvings,
/// and returns whichever of the final bracket ends has the smaller residual.
pub fn bisect<F>(f: F, lo: f64, hi: f64, x_tol: f64, max_iter: usize) -> Result<Root>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(Root { x: lo, residual: 0.0, bracket: (lo, hi), iterations: 0 });
    }
    if f_hi == 0.0 {
        return Ok(Root { x: hi, residual: 0.0, bracket: (lo, hi), iterations: 0 });
    }
    if !(f_lo.signum() != f_hi.signum()) || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::RootNotBracketed { lo, hi, f_lo, f_hi });
    }
    let mut f_hi = f_hi;
    let mut iterations = 0;
    while hi - lo > x_tol && iterations < max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        iterations += 1;
        if f_mid == 0.0 {
            return Ok(Root { x: mid, residual: 0.0, bracket: (lo, hi), iterations });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    let (x, residual) = if f_lo.abs() <= f_hi.abs() { (lo, f_lo) } else { (hi, f_hi) };
    Ok(Root { x, residual, bracket: (lo, hi), iterations })
}

/// Grows `hi` away from `lo` (doubling the width) until `pred(hi)` holds.
pub fn expand_until<P>(lo: f64, hi: f64, max_doublings: usize, pred: P) -> Result<f64>
where
    P: Fn(f64) -> bool,
{
    let mut hi = hi;
    for _ in 0..=max_doublings {
        if pred(hi) {
            return Ok(hi);
        }
        hi = lo + 2.0 * (hi - lo);
    }
    Err(Error::BracketExpansion { doublings: max_doublings, hi })
}
