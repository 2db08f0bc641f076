//! The focal-entropy minimizer.
//!
//! For a pmf `p` with support `S` the unique minimizer of `q -> H_gamma(p, q)`
//! is `P*(x) = (L'_gamma)^{-1}(-alpha* / p(x))` on `S`, where `alpha*` is the
//! positive root of the normalization `F(alpha) = sum_S (L'_gamma)^{-1}(-alpha / p(x)) = 1`.
//! `F` is strictly decreasing from `|S|` to `0`, so the root is found by
//! bisection, carried out on `ln(alpha)` so that very large `gamma` (where
//! `alpha*` is astronomically small) stays representable.

use serde::Serialize;

use crate::error::{FocalError, Result};
use crate::focal::{d1_unchecked, inverse_at_log, kappa, log_neg_d1, phi_peak, phi_unchecked, FocusParam};
use crate::io::{sig17, sig17_opt};
use crate::pmf::{harmonic_mean, Pmf};
use crate::real::Real;

const MAX_BISECTIONS: usize = 200;
const MAX_EXPANSIONS: usize = 60;
const EXPANSION_FACTOR: f64 = 4.0;
const LOG_ALPHA_WIDTH: f64 = 1e-14;

/// The minimizer together with its normalization constant and diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizerResult<T: Real> {
    #[serde(serialize_with = "sig17")]
    pub alpha_star: T,
    #[serde(serialize_with = "sig17")]
    pub residual: T,
    pub iterations: usize,
    #[serde(serialize_with = "crate::io::sig17_seq")]
    pub bracket: [T; 2],
    pub p_star: Pmf<T>,
    #[serde(skip)]
    pub log_alpha_star: T,
}

/// Which `phi`-based bracket applies to `alpha*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiBoundKind {
    /// `gamma > kappa(p_min)`: `phi(p_max) <= alpha* <= phi(p_min)`.
    AboveKappaMin,
    /// `gamma < kappa(p_max)`: `phi(p_min) < alpha* < phi(p_max)`.
    BelowKappaMax,
}

/// Provable brackets for `alpha*`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaBounds<T: Real> {
    /// `c_{N,gamma} = -L'_gamma(1/N)`.
    #[serde(serialize_with = "sig17")]
    pub c_n_gamma: T,
    #[serde(serialize_with = "sig17")]
    pub box_lo: T,
    #[serde(serialize_with = "sig17")]
    pub box_hi: T,
    #[serde(serialize_with = "sig17_opt")]
    pub phi_lo: Option<T>,
    #[serde(serialize_with = "sig17_opt")]
    pub phi_hi: Option<T>,
    pub phi_kind: Option<PhiBoundKind>,
    /// `max_t phi_gamma(t)`, itself at most `1 + gamma`.
    #[serde(serialize_with = "sig17")]
    pub phi_max: T,
}

impl<T: Real> AlphaBounds<T> {
    /// Intersection of every applicable interval.
    pub fn tightest(&self) -> (T, T) {
        let mut lo = self.box_lo;
        let mut hi = self.box_hi.min(self.phi_max);
        if let (Some(a), Some(b)) = (self.phi_lo, self.phi_hi) {
            lo = lo.max(a);
            hi = hi.min(b);
        }
        (lo, hi)
    }

    /// Whether `alpha` satisfies every applicable bound up to a relative `slack`.
    pub fn contains(&self, alpha: T, slack: T) -> bool {
        let within = |lo: T, hi: T| alpha >= lo * (T::one() - slack) && alpha <= hi * (T::one() + slack);
        let mut ok = within(self.box_lo, self.box_hi) && alpha <= self.phi_max * (T::one() + slack);
        if let (Some(a), Some(b)) = (self.phi_lo, self.phi_hi) {
            ok &= within(a, b);
        }
        ok
    }
}

fn support_logs<T: Real>(p: &Pmf<T>) -> Vec<T> {
    p.support().map(|i| p.prob(i).ln()).collect()
}

/// `F` at `ln(alpha)`, summed over the support given by its log-probabilities.
fn normalization_at_log<T: Real>(gamma: FocusParam<T>, log_p: &[T], log_alpha: T) -> Result<T> {
    log_p
        .iter()
        .map(|&lp| inverse_at_log(gamma, log_alpha - lp))
        .sum()
}

/// `F(alpha) = sum_S (L'_gamma)^{-1}(-alpha / p(x))`.
pub fn normalization_f<T: Real>(gamma: FocusParam<T>, p: &Pmf<T>, alpha: T) -> Result<T> {
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(FocalError::domain("normalization_f", format!("alpha = {} must be positive", alpha)));
    }
    normalization_at_log(gamma, &support_logs(p), alpha.ln())
}

/// `c_{N,gamma}`-box, the `phi` brackets and the global cap on `alpha*`.
///
/// Needs `|S| >= 2`; a point mass has no interior normalization root.
pub fn alpha_bounds<T: Real>(gamma: FocusParam<T>, p: &Pmf<T>) -> Result<AlphaBounds<T>> {
    let n = p.support_size();
    if n < 2 {
        return Err(FocalError::domain("alpha_bounds", "support of size 1"));
    }
    let g = gamma.get();
    let c = -d1_unchecked(gamma, T::one() / T::from_usize_lossy(n));
    let (p_min, p_max) = (p.p_min(), p.p_max());
    let (mut phi_lo, mut phi_hi, mut phi_kind) = (None, None, None);
    if g > kappa(p_min)? {
        phi_lo = Some(phi_unchecked(gamma, p_max));
        phi_hi = Some(phi_unchecked(gamma, p_min));
        phi_kind = Some(PhiBoundKind::AboveKappaMin);
    } else if g < kappa(p_max)? {
        phi_lo = Some(phi_unchecked(gamma, p_min));
        phi_hi = Some(phi_unchecked(gamma, p_max));
        phi_kind = Some(PhiBoundKind::BelowKappaMax);
    }
    Ok(AlphaBounds {
        c_n_gamma: c,
        box_lo: p_min * c,
        box_hi: p_max * c,
        phi_lo,
        phi_hi,
        phi_kind,
        phi_max: phi_peak(gamma)?.phi_max,
    })
}

/// Solves `F(alpha*) = 1` and assembles `P*`.
///
/// `gamma = 0` returns `p` itself with `alpha* = 1`. A point mass is its own
/// minimizer; it is returned with `alpha* = 0`. The assembled `P*` is rescaled
/// by its total, which differs from one by at most the normalization residual.
pub fn solve_minimizer<T: Real>(gamma: FocusParam<T>, p: &Pmf<T>) -> Result<MinimizerResult<T>> {
    let n = p.support_size();
    if gamma.is_zero() {
        let nn = T::from_usize_lossy(n);
        return Ok(MinimizerResult {
            alpha_star: T::one(),
            residual: T::zero(),
            iterations: 0,
            bracket: [nn * p.p_min(), nn * p.p_max()],
            p_star: p.clone(),
            log_alpha_star: T::zero(),
        });
    }
    if n == 1 {
        return Ok(MinimizerResult {
            alpha_star: T::zero(),
            residual: T::zero(),
            iterations: 0,
            bracket: [T::zero(), T::zero()],
            p_star: p.clone(),
            log_alpha_star: T::neg_infinity(),
        });
    }

    let g = gamma.get();
    let log_p = support_logs(p);
    let log_c = log_neg_d1(g, T::one() / T::from_usize_lossy(n));
    let mut lo = p.p_min().ln() + log_c;
    let mut hi = p.p_max().ln() + log_c;
    let excess = |la: T| normalization_at_log(gamma, &log_p, la).map(|f| f - T::one());

    // The box is provable; expansion only absorbs rounding at its edges.
    let step = T::c(EXPANSION_FACTOR).ln();
    let mut f_lo = excess(lo)?;
    let mut expansions = 0;
    while f_lo < T::zero() {
        expansions += 1;
        if expansions > MAX_EXPANSIONS {
            return Err(FocalError::Bracket { op: "solve_minimizer", lo: lo.exp().as_f64(), hi: hi.exp().as_f64() });
        }
        lo = lo - step;
        f_lo = excess(lo)?;
    }
    let mut f_hi = excess(hi)?;
    while f_hi > T::zero() {
        expansions += 1;
        if expansions > MAX_EXPANSIONS {
            return Err(FocalError::Bracket { op: "solve_minimizer", lo: lo.exp().as_f64(), hi: hi.exp().as_f64() });
        }
        hi = hi + step;
        f_hi = excess(hi)?;
    }
    let bracket = [lo.exp(), hi.exp()];

    let tol = T::normalization_tol();
    let (mut log_alpha, mut residual) = if f_lo.abs() <= f_hi.abs() { (lo, f_lo.abs()) } else { (hi, f_hi.abs()) };
    let mut iterations = 0;
    while residual > tol && hi - lo > T::c(LOG_ALPHA_WIDTH) {
        iterations += 1;
        if iterations > MAX_BISECTIONS {
            return Err(FocalError::Convergence { op: "solve_minimizer", iterations, residual: residual.as_f64() });
        }
        let mid = lo + (hi - lo) / T::c(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = excess(mid)?;
        if f_mid > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        log_alpha = mid;
        residual = f_mid.abs();
    }
    if residual > tol {
        return Err(FocalError::Convergence { op: "solve_minimizer", iterations, residual: residual.as_f64() });
    }

    let mut probs = vec![T::zero(); p.len()];
    for (i, lp) in p.support().zip(&log_p) {
        probs[i] = inverse_at_log(gamma, log_alpha - *lp)?;
    }
    Ok(MinimizerResult {
        alpha_star: log_alpha.exp(),
        residual,
        iterations,
        bracket,
        p_star: p.with_probs(probs),
        log_alpha_star: log_alpha,
    })
}

/// Recovers the `p` whose minimizer is `p_star`: `P(x) = beta / L'_gamma(p_star(x))`.
pub fn inverse_operator<T: Real>(gamma: FocusParam<T>, p_star: &Pmf<T>) -> Result<Pmf<T>> {
    if gamma.is_zero() {
        return Ok(p_star.clone());
    }
    if p_star.support().any(|i| p_star.prob(i) >= T::one()) {
        return Err(FocalError::domain("inverse_operator", "point mass has no preimage"));
    }
    let g = gamma.get();
    let mut logs = vec![T::neg_infinity(); p_star.len()];
    for i in p_star.support() {
        logs[i] = -log_neg_d1(g, p_star.prob(i));
    }
    let top = logs.iter().copied().fold(T::neg_infinity(), T::max);
    let weights = logs.into_iter().map(|l| (l - top).exp()).collect();
    Ok(p_star.with_probs(weights))
}

/// `p_{k+1} = P*_gamma(p_k)` for `k = 0..steps`; returns `[p_1, ..., p_steps]`.
pub fn recurse_minimizer<T: Real>(gamma: FocusParam<T>, p0: &Pmf<T>, steps: usize) -> Result<Vec<Pmf<T>>> {
    if steps == 0 {
        return Err(FocalError::domain("recurse_minimizer", "steps must be at least 1"));
    }
    let mut out: Vec<Pmf<T>> = Vec::with_capacity(steps);
    let mut current = p0.clone();
    for _ in 0..steps {
        current = solve_minimizer(gamma, &current)?.p_star;
        out.push(current.clone());
    }
    Ok(out)
}

/// Large-`gamma` approximation `-L'_gamma(1/|S|) HM(p)` of `alpha*`.
pub fn alpha_asymptotic<T: Real>(gamma: FocusParam<T>, p: &Pmf<T>) -> T {
    let n = p.support_size();
    if n < 2 {
        return T::zero();
    }
    log_neg_d1(gamma.get(), T::one() / T::from_usize_lossy(n)).exp() * harmonic_mean(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::focal::phi;

    fn fp(g: f64) -> FocusParam<f64> {
        FocusParam::new(g).unwrap()
    }

    fn pmf(v: &[f64]) -> Pmf<f64> {
        Pmf::from_probs(v.to_vec()).unwrap()
    }

    #[test]
    fn normalization_examples() {
        let u = Pmf::<f64>::uniform(4).unwrap();
        for &g in &[0.5, 1.0, 3.0] {
            let a = phi(fp(g), 0.25).unwrap();
            assert!((normalization_f(fp(g), &u, a).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(normalization_f(fp(2.0), &u, 1e6).unwrap() < 1e-3);
        let p = pmf(&[0.65, 0.35]);
        let per_term = crate::focal_d1_inverse(fp(1.0), -1.0 / 0.65).unwrap()
            + crate::focal_d1_inverse(fp(1.0), -1.0 / 0.35).unwrap();
        assert!((normalization_f(fp(1.0), &p, 1.0).unwrap() - per_term).abs() < 1e-15);
        assert!(normalization_f(fp(1.0), &p, 0.0).is_err());
    }

    #[test]
    fn bounds_examples() {
        let u = Pmf::<f64>::uniform(3).unwrap();
        let b = alpha_bounds(fp(1.5), &u).unwrap();
        let phi_u = phi(fp(1.5), 1.0 / 3.0).unwrap();
        assert!((b.box_lo - phi_u).abs() < 1e-15 && (b.box_hi - phi_u).abs() < 1e-15);

        let p = pmf(&[0.1, 0.6, 0.3]);
        let b = alpha_bounds(fp(0.0), &p).unwrap();
        assert_eq!(b.c_n_gamma, 3.0);
        assert!(b.box_lo <= 1.0 && 1.0 <= b.box_hi);

        // [0.65, 0.35], gamma = 1: c = -L'_1(1/2) = ln 2 + 1
        let p = pmf(&[0.65, 0.35]);
        let b = alpha_bounds(fp(1.0), &p).unwrap();
        let c = 2f64.ln() + 1.0;
        assert!((b.c_n_gamma - c).abs() < 1e-15);
        assert!((b.box_lo - 0.35 * c).abs() < 1e-15);
        assert!((b.box_hi - 0.65 * c).abs() < 1e-15);
        // kappa(0.35) < 1 so the decreasing-phi bracket applies
        assert_eq!(b.phi_kind, Some(PhiBoundKind::AboveKappaMin));
        let r = solve_minimizer(fp(1.0), &p).unwrap();
        assert!(b.contains(r.alpha_star, 1e-12));
        assert!(r.alpha_star <= 2.0);
    }

    #[test]
    fn uniform_is_fixed_point() {
        for n in 2..6 {
            let u = Pmf::<f64>::uniform(n).unwrap();
            for &g in &[0.2, 1.0, 7.0] {
                let r = solve_minimizer(fp(g), &u).unwrap();
                assert!(r.p_star.total_variation(&u).unwrap() < 1e-12);
                let a = phi(fp(g), 1.0 / n as f64).unwrap();
                assert!((r.alpha_star - a).abs() < 1e-10 * a);
            }
        }
    }

    #[test]
    fn gamma_zero_and_point_mass() {
        let p = pmf(&[0.1, 0.0, 0.9]);
        let r = solve_minimizer(fp(0.0), &p).unwrap();
        assert_eq!(r.p_star, p);
        assert_eq!(r.alpha_star, 1.0);
        let point = pmf(&[0.0, 1.0]);
        let r = solve_minimizer(fp(2.0), &point).unwrap();
        assert_eq!(r.p_star, point);
    }

    #[test]
    fn zero_mass_labels_stay_zero() {
        let p = pmf(&[0.2, 0.0, 0.5, 0.3]);
        let r = solve_minimizer(fp(1.0), &p).unwrap();
        assert_eq!(r.p_star.prob(1), 0.0);
        assert!(r.residual <= 1e-10);
    }

    #[test]
    fn inverse_operator_round_trip() {
        let q = pmf(&[0.3, 0.2, 0.5]);
        assert_eq!(inverse_operator(fp(0.0), &q).unwrap(), q);
        let u = Pmf::<f64>::uniform(4).unwrap();
        assert!(inverse_operator(fp(2.0), &u).unwrap().total_variation(&u).unwrap() < 1e-15);
        for &g in &[0.3, 1.0, 4.0] {
            let p = inverse_operator(fp(g), &q).unwrap();
            let back = solve_minimizer(fp(g), &p).unwrap().p_star;
            for (a, b) in back.probs().iter().zip(q.probs()) {
                assert!((a - b).abs() < 1e-8);
            }
        }
        assert!(inverse_operator(fp(1.0), &pmf(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn recursion_moves_non_uniform_only() {
        let u = Pmf::<f64>::uniform(3).unwrap();
        for q in recurse_minimizer(fp(1.0), &u, 3).unwrap() {
            assert!(q.total_variation(&u).unwrap() < 1e-12);
        }
        let p = pmf(&[0.5, 0.3, 0.2]);
        let seq = recurse_minimizer(fp(1.0), &p, 3).unwrap();
        assert!(seq[0].total_variation(&p).unwrap() > 1e-3);
        assert!(seq[1].total_variation(&seq[0]).unwrap() > 1e-3);
        assert!(recurse_minimizer(fp(1.0), &p, 0).is_err());
    }

    #[test]
    fn asymptotic_matches_exact_for_uniform() {
        let u = Pmf::<f64>::uniform(3).unwrap();
        for &g in &[0.5, 2.0, 20.0] {
            let exact = solve_minimizer(fp(g), &u).unwrap().alpha_star;
            let approx = alpha_asymptotic(fp(g), &u);
            assert!((exact - approx).abs() <= 1e-10 * exact);
        }
    }

    #[test]
    fn very_large_gamma_stays_finite() {
        let p = pmf(&[0.65, 0.35]);
        let r = solve_minimizer(fp(1000.0), &p).unwrap();
        assert!(r.alpha_star > 0.0 && r.log_alpha_star.is_finite());
        assert!((r.p_star.prob(0) - 0.5).abs() < 1e-2);
        let r = solve_minimizer(fp(5000.0), &p).unwrap();
        assert!(r.log_alpha_star.is_finite());
        assert!(r.p_star.prob(0) >= r.p_star.prob(1));
    }

    #[test]
    fn single_precision_minimizer() {
        let p = Pmf::<f32>::from_probs(vec![0.182_058_78, 0.462_129_1, 0.355_812_13]).unwrap();
        let r = solve_minimizer(FocusParam::new(1.0f32).unwrap(), &p).unwrap();
        assert!((r.p_star.prob(0) - 0.205_600_7).abs() < 1e-4);
    }
}
