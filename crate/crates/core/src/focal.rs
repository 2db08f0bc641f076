//! Scalar focal-loss functions of `(gamma, p)`.
//!
//! `L_gamma(p) = (1 - p)^gamma * ln(1/p)` together with its first two
//! derivatives in `p`, the inverse of the first derivative, the score
//! `phi_gamma(p) = -p L'_gamma(p)` and the threshold `kappa(p)` that decides
//! where `phi_gamma` rises or falls.

use serde::Serialize;

use crate::error::{FocalError, Result};
use crate::lambert::lambert_w0;
use crate::real::Real;
use crate::roots::{bisect, midpoint};

const MAX_ITER: usize = 200;
const BRACKET_DELTA: f64 = 1e-15;
const KAPPA_FLOOR: f64 = 1e-300;

/// Focus parameter `gamma >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct FocusParam<T>(T);

impl<T: Real> FocusParam<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if gamma.is_finite() && gamma >= T::zero() {
            Ok(FocusParam(gamma))
        } else {
            Err(FocalError::domain(
                "FocusParam",
                format!("gamma must be finite and non-negative, got {}", gamma),
            ))
        }
    }

    /// Cross-entropy setting.
    pub fn zero() -> Self {
        FocusParam(T::zero())
    }

    #[inline]
    pub fn get(self) -> T {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == T::zero()
    }
}

/// A prediction score in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Prob<T>(T);

impl<T: Real> Prob<T> {
    pub fn new(value: T) -> Result<Self> {
        if value > T::zero() && value <= T::one() {
            Ok(Prob(value))
        } else {
            Err(FocalError::domain(
                "Prob",
                format!("probability must lie in (0, 1], got {}", value),
            ))
        }
    }

    #[inline]
    pub fn get(self) -> T {
        self.0
    }
}

fn require_open<T: Real>(op: &'static str, p: T) -> Result<()> {
    if p > T::zero() && p < T::one() {
        Ok(())
    } else {
        Err(FocalError::domain(op, format!("p = {} outside (0, 1)", p)))
    }
}

/// `(1 - q)^gamma` with `0^0 = 1`.
#[inline]
pub(crate) fn modulation<T: Real>(gamma: FocusParam<T>, q: T) -> T {
    if gamma.is_zero() {
        T::one()
    } else {
        (T::one() - q).powf(gamma.get())
    }
}

/// Focal loss `(1 - p)^gamma ln(1/p)`; exactly zero at `p = 1`.
pub fn focal_loss<T: Real>(gamma: FocusParam<T>, p: T) -> Result<T> {
    let p = Prob::new(p).map_err(|_| FocalError::domain("focal_loss", format!("p = {} outside (0, 1]", p)))?;
    Ok(focal_loss_unchecked(gamma, p.get()))
}

#[inline]
pub(crate) fn focal_loss_unchecked<T: Real>(gamma: FocusParam<T>, p: T) -> T {
    if p == T::one() {
        return T::zero();
    }
    modulation(gamma, p) * -p.ln()
}

/// `L'_gamma(p) = -(1-p)^(gamma-1) (gamma ln(1/p) + (1-p)/p)`, strictly negative.
pub fn focal_loss_d1<T: Real>(gamma: FocusParam<T>, p: T) -> Result<T> {
    require_open("focal_loss_d1", p)?;
    Ok(d1_unchecked(gamma, p))
}

#[inline]
pub(crate) fn d1_unchecked<T: Real>(gamma: FocusParam<T>, p: T) -> T {
    let g = gamma.get();
    let one_m = T::one() - p;
    -(one_m.powf(g - T::one())) * (g * -p.ln() + one_m / p)
}

/// `L''_gamma(p)`, strictly positive on `(0, 1)`.
pub fn focal_loss_d2<T: Real>(gamma: FocusParam<T>, p: T) -> Result<T> {
    require_open("focal_loss_d2", p)?;
    Ok(d2_unchecked(gamma, p))
}

#[inline]
pub(crate) fn d2_unchecked<T: Real>(gamma: FocusParam<T>, p: T) -> T {
    let g = gamma.get();
    let one_m = T::one() - p;
    let two = T::c(2.0);
    let bracket = g * (T::one() - g) * p * p * p.ln() + two * g * p * one_m + one_m * one_m;
    one_m.powf(g - two) / (p * p) * bracket
}

/// `ln(-L'_gamma(p))`, finite on `(0, 1)` for every `gamma`.
#[inline]
pub(crate) fn log_neg_d1<T: Real>(g: T, p: T) -> T {
    (g - T::one()) * (-p).ln_1p() + (g * -p.ln() + (T::one() - p) / p).ln()
}

/// Derivative of [`log_neg_d1`] in `p`.
#[inline]
fn log_neg_d1_slope<T: Real>(g: T, p: T) -> T {
    let one_m = T::one() - p;
    (T::one() - g) / one_m - (g / p + T::one() / (p * p)) / (g * -p.ln() + one_m / p)
}

/// The unique `p` in `(0, 1)` with `L'_gamma(p) = t`, for `t < 0`.
///
/// Closed forms are used for `gamma = 0` (`-1/t`, defined only for `t < -1`)
/// and `gamma = 1` (`1 / W0(e^(1-t))`). Every other case runs a safeguarded
/// Newton iteration on `ln(-L'_gamma(p)) = ln(-t)`, falling back to bisection
/// whenever an iterate leaves the bracket.
pub fn focal_d1_inverse<T: Real>(gamma: FocusParam<T>, t: T) -> Result<T> {
    if !(t < T::zero()) || !t.is_finite() {
        return Err(FocalError::domain(
            "focal_d1_inverse",
            format!("t = {} must be finite and negative", t),
        ));
    }
    inverse_at_log(gamma, (-t).ln())
}

/// Inverse of `L'_gamma` addressed by `ln(-t)`, which stays representable
/// when `t` itself would underflow.
pub(crate) fn inverse_at_log<T: Real>(gamma: FocusParam<T>, log_neg_t: T) -> Result<T> {
    let g = gamma.get();
    if gamma.is_zero() {
        if log_neg_t <= T::zero() {
            return Err(FocalError::domain(
                "focal_d1_inverse",
                format!("t = {} outside the range (-inf, -1) of L'_0", -log_neg_t.exp()),
            ));
        }
        return Ok((-log_neg_t).exp());
    }
    if g == T::one() {
        let arg = (T::one() + log_neg_t.exp()).exp();
        if arg.is_finite() {
            let p = T::one() / lambert_w0(arg)?;
            return Ok(p.min(T::one() - T::epsilon() / T::c(2.0)));
        }
    }
    inverse_newton(g, log_neg_t)
}

fn inverse_newton<T: Real>(g: T, target: T) -> Result<T> {
    let f = |p: T| log_neg_d1(g, p) - target;

    let delta = T::c(BRACKET_DELTA);
    let mut lo = delta;
    while f(lo) <= T::zero() {
        if lo < T::min_positive_value() * T::c(1e20) {
            return Err(FocalError::Bracket {
                op: "focal_d1_inverse",
                lo: lo.as_f64(),
                hi: 1.0,
            });
        }
        lo = lo * T::c(1e-10);
    }
    let mut hi = T::one() - delta.max(T::epsilon());
    if f(hi) >= T::zero() {
        // Root closer to 1 than the bracket; settle for the largest p below 1.
        let top = T::one() - T::epsilon() / T::c(2.0);
        if f(top) >= T::zero() {
            return Ok(top);
        }
        hi = top;
    }

    let guess = (-target).exp();
    let mut p = if guess > lo && guess < hi { guess } else { midpoint(lo, hi) };
    let tol = T::solve_tol();
    let mut last = T::infinity();
    for _ in 0..MAX_ITER {
        let fp = f(p);
        if fp == T::zero() {
            return Ok(p);
        }
        if fp > T::zero() {
            lo = p;
        } else {
            hi = p;
        }
        let mut next = p - fp / log_neg_d1_slope(g, p);
        if !(next > lo && next < hi) {
            next = midpoint(lo, hi);
        }
        let step = (next - p).abs();
        p = next;
        if step <= tol * p.min(T::one() - p).max(T::epsilon()) || hi - lo <= T::epsilon() * hi {
            return Ok(p);
        }
        last = fp.abs();
    }
    Err(FocalError::Convergence {
        op: "focal_d1_inverse",
        iterations: MAX_ITER,
        residual: last.as_f64(),
    })
}

/// `phi_gamma(p) = -p L'_gamma(p) = (1-p)^(gamma-1) (gamma p ln(1/p) + 1 - p)`.
pub fn phi<T: Real>(gamma: FocusParam<T>, p: T) -> Result<T> {
    require_open("phi", p)?;
    Ok(phi_unchecked(gamma, p))
}

#[inline]
pub(crate) fn phi_unchecked<T: Real>(gamma: FocusParam<T>, p: T) -> T {
    let g = gamma.get();
    let one_m = T::one() - p;
    one_m.powf(g - T::one()) * (g * p * -p.ln() + one_m)
}

/// `kappa(p) = 1/p - 2(1-p) / (p ln(1/p))`.
///
/// Strictly decreasing from `+inf` at `0+` to `-1` at `1-`; `phi_gamma` is
/// increasing at `p` exactly when `gamma < kappa(p)`. Inputs below `1e-300`
/// are clamped there.
pub fn kappa<T: Real>(p: T) -> Result<T> {
    require_open("kappa", p)?;
    let p = p.max(T::c(KAPPA_FLOOR).max(T::min_positive_value()));
    Ok(T::one() / p - T::c(2.0) * (T::one() - p) / (p * -p.ln()))
}

/// The zero of `kappa`: `w = -W0(-2/e^2) / 2 ~ 0.2032`.
pub fn kappa_zero<T: Real>() -> T {
    let x = -T::c(2.0) / (T::E() * T::E());
    -lambert_w0(x).expect("-2/e^2 lies in the W0 domain") / T::c(2.0)
}

/// Location and height of the maximum of `phi_gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiPeak<T> {
    /// `None` for `gamma = 0`, where `phi_0` is constant.
    pub p_plus: Option<T>,
    pub phi_max: T,
}

/// Maximizer `p+` of `phi_gamma`, the root of `kappa(p) = gamma` on `(0, w]`.
pub fn phi_peak<T: Real>(gamma: FocusParam<T>) -> Result<PhiPeak<T>> {
    if gamma.is_zero() {
        return Ok(PhiPeak {
            p_plus: None,
            phi_max: T::one(),
        });
    }
    let g = gamma.get();
    let w = kappa_zero::<T>();
    let mut lo = w / T::c(2.0);
    while kappa(lo)? <= g {
        lo = lo / T::c(4.0);
        if lo < T::c(KAPPA_FLOOR) {
            return Err(FocalError::Bracket {
                op: "phi_peak",
                lo: lo.as_f64(),
                hi: w.as_f64(),
            });
        }
    }
    let root = bisect(
        "phi_peak",
        lo,
        w,
        T::solve_tol() * lo,
        T::zero(),
        MAX_ITER,
        |p| Ok(kappa(p)? - g),
    )?;
    let p_plus = root.x;
    Ok(PhiPeak {
        p_plus: Some(p_plus),
        phi_max: phi_unchecked(gamma, p_plus),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn fp(g: f64) -> FocusParam<f64> {
        FocusParam::new(g).unwrap()
    }

    fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn focus_param_validation() {
        assert!(FocusParam::new(-1.0).is_err());
        assert!(FocusParam::new(f64::NAN).is_err());
        assert!(FocusParam::new(f64::INFINITY).is_err());
        assert!(FocusParam::new(0.0).is_ok());
        assert!(Prob::new(0.0).is_err());
        assert!(Prob::new(1.0).is_ok());
        assert!(Prob::new(1.5).is_err());
    }

    #[test]
    fn focal_loss_values() {
        assert!((focal_loss(fp(0.0), 0.25).unwrap() - 4f64.ln()).abs() < 1e-15);
        assert_eq!(focal_loss(fp(7.3), 1.0).unwrap(), 0.0);
        assert_eq!(focal_loss(fp(0.0), 1.0).unwrap(), 0.0);
        assert!((focal_loss(fp(1.0), 0.5).unwrap() - 0.5 * LN_2).abs() < 1e-15);
        assert!(focal_loss(fp(1.0), 0.0).is_err());
        assert!(focal_loss(fp(1.0), -0.1).is_err());
    }

    #[test]
    fn first_derivative_values() {
        assert!((focal_loss_d1(fp(0.0), 0.5).unwrap() + 2.0).abs() < 1e-15);
        assert!((focal_loss_d1(fp(1.0), 0.5).unwrap() + (LN_2 + 1.0)).abs() < 1e-15);
        let fd = central(|p| focal_loss(fp(2.0), p).unwrap(), 0.3, 1e-6);
        let d1 = focal_loss_d1(fp(2.0), 0.3).unwrap();
        assert!(((d1 - fd) / fd).abs() < 1e-8);
        assert!(focal_loss_d1(fp(0.5), 1.0).is_err());
        assert!(focal_loss_d1(fp(0.5), 0.0).is_err());
    }

    #[test]
    fn second_derivative_values() {
        assert!((focal_loss_d2(fp(0.0), 0.5).unwrap() - 4.0).abs() < 1e-14);
        // L_1(p) = (1-p) ln(1/p) has L'' = 1/p + 1/p^2.
        let d2 = focal_loss_d2(fp(1.0), 0.5).unwrap();
        assert!((d2 - 6.0).abs() < 1e-14);
        let fd = central(|p| focal_loss_d1(fp(1.0), p).unwrap(), 0.5, 1e-6);
        assert!(((d2 - fd) / fd).abs() < 1e-7);
        let fd = central(|p| focal_loss_d1(fp(0.5), p).unwrap(), 0.9, 1e-6);
        let d2 = focal_loss_d2(fp(0.5), 0.9).unwrap();
        assert!(((d2 - fd) / fd).abs() < 1e-7);
        assert!(focal_loss_d2(fp(0.5), 1.0).is_err());
    }

    #[test]
    fn inverse_closed_forms_and_limits() {
        assert_eq!(focal_d1_inverse(fp(0.0), -2.0).unwrap(), 0.5);
        assert!(focal_d1_inverse(fp(0.0), -0.5).is_err());
        assert!(focal_d1_inverse(fp(0.0), -1.0).is_err());
        assert!(focal_d1_inverse(fp(1.0), 0.0).is_err());
        assert!(focal_d1_inverse(fp(1.0), 1.0).is_err());
        let near_one = focal_d1_inverse(fp(1.0), -1e-10).unwrap();
        assert!(near_one > 0.9999 && near_one < 1.0);
        // gamma = 1 closed form agrees with the generic solver.
        for &t in &[-1e3, -20.0, -2.0, -0.3, -1e-3] {
            let closed = focal_d1_inverse(fp(1.0), t).unwrap();
            let newton = inverse_newton(1.0, (-t).ln()).unwrap();
            assert!((closed - newton).abs() < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn inverse_matches_grid_oracle() {
        // Dense grid then repeated local refinement, no Newton involved.
        let g = fp(2.0);
        let target = -5.0;
        let (mut lo, mut hi) = (1e-6, 1.0 - 1e-6);
        for _ in 0..12 {
            let n = 1000;
            let step = (hi - lo) / n as f64;
            let mut best = lo;
            for i in 0..=n {
                let p = lo + step * i as f64;
                let v = (focal_loss_d1(g, p).unwrap() - target).abs();
                if v < (focal_loss_d1(g, best).unwrap() - target).abs() {
                    best = p;
                }
            }
            lo = (best - step).max(1e-9);
            hi = (best + step).min(1.0 - 1e-12);
        }
        let oracle = 0.5 * (lo + hi);
        assert!((oracle - 0.22435567865462).abs() < 1e-9);
        let p = focal_d1_inverse(g, target).unwrap();
        assert!((p - oracle).abs() < 1e-12);
    }

    #[test]
    fn inverse_handles_extreme_arguments() {
        for &g in &[0.3, 1.0, 2.0, 31.6, 1000.0] {
            let p = focal_d1_inverse(fp(g), -1e12).unwrap();
            assert!(p > 0.0 && p < 1e-11, "gamma = {g}");
            let p = focal_d1_inverse(fp(g), -1e-200).unwrap();
            assert!(p > 0.0 && p < 1.0);
        }
    }

    #[test]
    fn phi_values() {
        for &p in &[0.01, 0.3, 0.77] {
            assert!((phi(fp(0.0), p).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!((phi(fp(1.0), 0.5).unwrap() - (0.5 * LN_2 + 0.5)).abs() < 1e-15);
        let fd = central(|p| focal_loss(fp(3.0), p).unwrap(), 0.1, 1e-6);
        assert!((phi(fp(3.0), 0.1).unwrap() - (-0.1 * fd)).abs() < 1e-8);
        assert!(phi(fp(1.0), 1.0).is_err());
    }

    #[test]
    fn kappa_values() {
        let w = kappa_zero::<f64>();
        assert!((w - 0.2032).abs() < 1e-4);
        assert!(kappa(w).unwrap().abs() < 1e-12);
        let expect = 2.0 - 1.0 / (0.5 * LN_2);
        assert!((kappa(0.5).unwrap() - expect).abs() < 1e-14);
        // Sign of d(phi)/dp flips as gamma crosses kappa(p).
        let p = 0.01;
        let k: f64 = kappa(p).unwrap();
        assert!((k - 57.004846291578).abs() < 1e-9);
        let slope = |g: f64| central(|x| phi(fp(g), x).unwrap(), p, 1e-7);
        assert!(slope(k - 0.5) > 0.0);
        assert!(slope(k + 0.5) < 0.0);
    }

    #[test]
    fn peak_location() {
        let zero = phi_peak(fp(0.0)).unwrap();
        assert_eq!(zero.p_plus, None);
        assert_eq!(zero.phi_max, 1.0);

        let peak = phi_peak(fp(2.0)).unwrap();
        let p_plus = peak.p_plus.unwrap();
        // grid argmax oracle
        let n = 2_000_000;
        let mut best = (0.0, f64::MIN);
        for i in 1..n {
            let p = i as f64 / n as f64 * 0.5;
            let v = phi(fp(2.0), p).unwrap();
            if v > best.1 {
                best = (p, v);
            }
        }
        assert!((p_plus - best.0).abs() < 1e-6);
        assert!((peak.phi_max - best.1).abs() < 1e-12);
        assert!(p_plus <= 1.0 / (1.0 + 3f64.sqrt()).powi(2));
    }
}
