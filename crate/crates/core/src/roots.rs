//! Bracketed scalar root finding used by the solvers in this crate.

use crate::error::{FocalError, Result};
use crate::real::Real;

/// Result of a bracketed solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root<T> {
    pub x: T,
    pub lo: T,
    pub hi: T,
    pub iterations: usize,
}

/// Bisection for a monotone `f` with `f(lo)` and `f(hi)` of opposite sign.
///
/// Stops when the bracket is narrower than `x_tol` or `|f| <= f_tol`. When the
/// bracket spans several orders of magnitude on the positive axis the midpoint
/// is taken geometrically.
pub fn bisect<T, F>(
    op: &'static str,
    mut lo: T,
    mut hi: T,
    x_tol: T,
    f_tol: T,
    max_iter: usize,
    mut f: F,
) -> Result<Root<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    let mut f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == T::zero() {
        return Ok(Root { x: lo, lo, hi: lo, iterations: 0 });
    }
    if f_hi == T::zero() {
        return Ok(Root { x: hi, lo: hi, hi, iterations: 0 });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(FocalError::Bracket {
            op,
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        });
    }
    for it in 1..=max_iter {
        let mid = midpoint(lo, hi);
        let f_mid = f(mid)?;
        let stalled = mid <= lo || mid >= hi;
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
        if f_mid.abs() <= f_tol || (hi - lo).abs() <= x_tol || stalled {
            return Ok(Root { x: mid, lo, hi, iterations: it });
        }
    }
    let x = midpoint(lo, hi);
    Err(FocalError::Convergence {
        op,
        iterations: max_iter,
        residual: f(x)?.abs().as_f64(),
    })
}

pub(crate) fn midpoint<T: Real>(lo: T, hi: T) -> T {
    if lo > T::zero() && hi > lo * T::c(1e3) {
        lo.sqrt() * hi.sqrt()
    } else {
        lo + (hi - lo) / T::c(2.0)
    }
}
