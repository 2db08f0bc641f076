//! Real branches of the Lambert W function.
//!
//! `W0` covers `[-1/e, inf)` and `W-1` covers `[-1/e, 0)`. Both are refined
//! by Halley iteration from a branch-appropriate starting point; inputs very
//! close to the branch point are answered directly from the branch-point
//! series, where Halley's denominator vanishes.

use crate::error::{FocalError, Result};
use crate::real::Real;

const MAX_ITER: usize = 200;

#[derive(Clone, Copy)]
enum Branch {
    Principal,
    Lower,
}

/// Principal branch `W0(x)`, `x >= -1/e`.
pub fn lambert_w0<T: Real>(x: T) -> Result<T> {
    let inv_e = T::one() / T::E();
    if x.is_nan() || x < -inv_e * (T::one() + T::c(4.0) * T::epsilon()) {
        return Err(FocalError::domain("lambert_w0", format!("x = {} < -1/e", x)));
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x.is_infinite() {
        return Ok(x);
    }
    let start = if x < T::c(-0.32) {
        match branch_point_series(x, Branch::Principal) {
            (w, true) => return Ok(w),
            (w, false) => w,
        }
    } else if x < T::c(3.0) {
        let l = x.ln_1p();
        l * (T::one() - l.ln_1p() / (T::c(2.0) + l))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    halley("lambert_w0", x, start)
}

/// Lower branch `W-1(x)`, `-1/e <= x < 0`.
pub fn lambert_wm1<T: Real>(x: T) -> Result<T> {
    let inv_e = T::one() / T::E();
    if x.is_nan() || x >= T::zero() || x < -inv_e * (T::one() + T::c(4.0) * T::epsilon()) {
        return Err(FocalError::domain(
            "lambert_wm1",
            format!("x = {} outside [-1/e, 0)", x),
        ));
    }
    let start = if x < T::c(-0.25) {
        match branch_point_series(x, Branch::Lower) {
            (w, true) => return Ok(w),
            (w, false) => w,
        }
    } else {
        let l1 = (-x).ln();
        let l2 = (-l1).ln();
        l1 - l2 + l2 / l1
    };
    halley("lambert_wm1", x, start)
}

/// Series in `p = sqrt(2(e x + 1))`; the flag says whether it is already
/// exact to working precision.
fn branch_point_series<T: Real>(x: T, branch: Branch) -> (T, bool) {
    let q = (T::c(2.0) * (T::E() * x + T::one())).max(T::zero());
    let mut p = q.sqrt();
    if let Branch::Lower = branch {
        p = -p;
    }
    let coeffs = [
        -1.0,
        1.0,
        -1.0 / 3.0,
        11.0 / 72.0,
        -43.0 / 540.0,
        769.0 / 17280.0,
        -221.0 / 8505.0,
    ];
    let mut w = T::zero();
    for &c in coeffs.iter().rev() {
        w = w * p + T::c(c);
    }
    // Truncation error is O(p^7).
    let exact = p.abs().powi(7) < T::epsilon();
    (w, exact)
}

fn halley<T: Real>(op: &'static str, x: T, mut w: T) -> Result<T> {
    let two = T::c(2.0);
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        if f == T::zero() {
            return Ok(w);
        }
        let wp1 = w + T::one();
        let denom = ew * wp1 - (w + two) * f / (two * wp1);
        if denom == T::zero() || !denom.is_finite() {
            break;
        }
        let next = w - f / denom;
        let done = (next - w).abs() <= T::c(4.0) * T::epsilon() * (T::one() + next.abs());
        w = next;
        if done {
            break;
        }
    }
    let residual = (w * w.exp() - x).abs();
    if residual <= T::lambert_tol() * x.abs().max(T::min_positive_value()) {
        Ok(w)
    } else {
        Err(FocalError::Convergence {
            op,
            iterations: MAX_ITER,
            residual: residual.as_f64(),
        })
    }
}
