//! How the minimizer reshapes a distribution: the gaps `d_i` between sorted
//! entries, the level-set roots of `phi_gamma`, over-suppression and its
//! sufficient conditions, two-point envelopes, the large-`gamma` limit of the
//! focal-entropy, and the ternary simplex scan.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{FocalError, Result};
use crate::focal::{d1_unchecked, kappa, phi_peak, FocusParam};
use crate::io::{fmt_sig17, sig17, sig17_seq};
use crate::lambert::lambert_wm1;
use crate::minimizer::{solve_minimizer, MinimizerResult};
use crate::pmf::{focal_entropy_log, kl_divergence, majorizes, shannon_entropy, EntropyValue, Pmf};
use crate::real::Real;
use crate::roots::bisect;

/// `|d_i|` at or below this is the boundary case `d_i >= 0`.
pub const BOUNDARY_TOL: f64 = 1e-10;
/// Slack on `alpha* >= 1` when deciding whether the small root exists.
pub const SMALL_ROOT_SLACK: f64 = 1e-12;
const PHI_MAX_SLACK: f64 = 1e-9;
const ROOT_MAX_ITER: usize = 4000;
const ENTROPY_SLACK: f64 = 1e-12;

/// Regime of a sorted entry relative to `(p_a, p_b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Tag {
    /// `p <= p_a`: shrunk although already small.
    OverSuppressed,
    /// `p_a < p < p_b`: mass increases.
    Amplified,
    /// `p >= p_b`: mass decreases.
    SuppressedHigh,
}

impl Tag {
    /// The sign of `d_i` the tag predicts; `true` means `d_i >= 0`.
    pub fn predicts_nonnegative(self) -> bool {
        !matches!(self, Tag::Amplified)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiRoots<T: Real> {
    #[serde(serialize_with = "sig17")]
    pub p_a: T,
    #[serde(serialize_with = "sig17")]
    pub p_b: T,
}

/// Roots of `phi_gamma(p) = alpha*` around the peak `p+`.
///
/// `p_b` is the root on `(p+, 1)`, which always exists. `p_a` is the root on
/// `(0, p+)` when `alpha* >= 1` and `0` otherwise.
pub fn phi_roots<T: Real>(gamma: FocusParam<T>, alpha_star: T) -> Result<PhiRoots<T>> {
    if !(alpha_star > T::zero()) {
        return Err(FocalError::domain("phi_roots", format!("alpha* = {} must be positive", alpha_star)));
    }
    phi_roots_log(gamma, alpha_star.ln())
}

/// `ln phi_gamma(p) = gamma ln(1-p) + ln(1 + gamma p ln(1/p) / (1-p))`.
fn log_phi<T: Real>(g: T, p: T) -> T {
    g * (-p).ln_1p() + (g * p * -p.ln() / (T::one() - p)).ln_1p()
}

pub(crate) fn phi_roots_log<T: Real>(gamma: FocusParam<T>, log_alpha: T) -> Result<PhiRoots<T>> {
    if gamma.is_zero() {
        return Err(FocalError::domain("phi_roots", "gamma must be positive"));
    }
    let g = gamma.get();
    let peak = phi_peak(gamma)?;
    let p_plus = peak.p_plus.expect("positive gamma has a peak");
    let log_max = peak.phi_max.ln();
    if log_alpha > log_max + T::c(PHI_MAX_SLACK) {
        return Err(FocalError::domain(
            "phi_roots",
            format!("alpha* = {} exceeds max phi = {}", log_alpha.exp(), peak.phi_max),
        ));
    }
    if log_alpha >= log_max {
        return Ok(PhiRoots { p_a: p_plus, p_b: p_plus });
    }
    let f = |p: T| Ok(log_phi(g, p) - log_alpha);

    let top = T::one() - T::epsilon();
    let p_b = if f(top)? >= T::zero() {
        top
    } else {
        bisect("phi_roots", p_plus, top, T::zero(), T::zero(), ROOT_MAX_ITER, f)?.x
    };

    let p_a = if log_alpha >= (T::one() - T::c(SMALL_ROOT_SLACK)).ln() {
        let floor = T::min_positive_value().sqrt();
        if f(floor)? >= T::zero() {
            T::zero()
        } else {
            bisect("phi_roots", floor, p_plus, T::zero(), T::zero(), ROOT_MAX_ITER, f)?.x
        }
    } else {
        T::zero()
    };
    Ok(PhiRoots { p_a, p_b })
}

/// Sorted gaps, regime tags and derived flags for one `(gamma, p)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport<T: Real> {
    /// `p_(i) - P*_(i)` over the support, both sorted descending.
    #[serde(serialize_with = "sig17_seq")]
    pub d: Vec<T>,
    #[serde(serialize_with = "sig17")]
    pub p_gamma_a: T,
    #[serde(serialize_with = "sig17")]
    pub p_gamma_b: T,
    #[serde(serialize_with = "sig17")]
    pub p_plus: T,
    #[serde(serialize_with = "sig17")]
    pub alpha_star: T,
    pub tags: Vec<Tag>,
    pub over_suppression: bool,
    pub sign_changes: usize,
    pub majorizes_flag: bool,
    #[serde(skip)]
    pub minimizer: MinimizerResult<T>,
}

fn sign_changes<T: Real>(d: &[T]) -> usize {
    let tol = T::c(BOUNDARY_TOL);
    let signs: Vec<bool> = d.iter().filter(|v| v.abs() > tol).map(|&v| v > T::zero()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

fn tag_for<T: Real>(p: T, roots: &PhiRoots<T>) -> Tag {
    if p <= roots.p_a {
        Tag::OverSuppressed
    } else if p < roots.p_b {
        Tag::Amplified
    } else {
        Tag::SuppressedHigh
    }
}

/// Solves the minimizer and classifies every sorted entry.
///
/// A uniform `p` is its own minimizer: `d` is zero and there is no
/// over-suppression, whatever the tags at the tangency say.
pub fn analyze<T: Real>(gamma: FocusParam<T>, p: &Pmf<T>) -> Result<RegimeReport<T>> {
    if gamma.is_zero() {
        return Err(FocalError::domain("analyze", "gamma must be positive"));
    }
    let n = p.support_size();
    if n < 2 {
        return Err(FocalError::domain("analyze", "support of size 1"));
    }
    let minimizer = solve_minimizer(gamma, p)?;
    let roots = phi_roots_log(gamma, minimizer.log_alpha_star)?;
    let p_plus = phi_peak(gamma)?.p_plus.expect("positive gamma has a peak");

    let sorted_p = &p.sorted_desc()[..n];
    let sorted_q = &minimizer.p_star.sorted_desc()[..n];
    let uniform = p.is_uniform_on_support(T::mass_tol());
    let d: Vec<T> = if uniform {
        vec![T::zero(); n]
    } else {
        sorted_p.iter().zip(sorted_q).map(|(&a, &b)| a - b).collect()
    };
    let tags: Vec<Tag> = sorted_p.iter().map(|&v| tag_for(v, &roots)).collect();
    let over_suppression = !uniform && tags.contains(&Tag::OverSuppressed);

    Ok(RegimeReport {
        sign_changes: sign_changes(&d),
        majorizes_flag: majorizes(p, &minimizer.p_star),
        d,
        p_gamma_a: roots.p_a,
        p_gamma_b: roots.p_b,
        p_plus,
        alpha_star: minimizer.alpha_star,
        tags,
        over_suppression,
        minimizer,
    })
}

impl<T: Real> RegimeReport<T> {
    /// Every `d_i` has the sign its tag predicts, `|d_i| <= 1e-10` counting as zero.
    pub fn tags_consistent(&self) -> bool {
        let tol = T::c(BOUNDARY_TOL);
        self.d.iter().zip(&self.tags).all(|(&d, t)| {
            if t.predicts_nonnegative() {
                d >= -tol
            } else {
                d < tol
            }
        })
    }
}

/// Checks that rule out over-suppression or force `d_1 >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SufficientConditions<T: Real> {
    /// `-p_max L'_gamma(1/|S|) < 1`; excludes over-suppression.
    pub prop14: bool,
    /// `gamma > kappa(p_min)`; excludes over-suppression.
    pub prop15: bool,
    /// `gamma > gamma0`; implies `d_1 >= 0`.
    pub prop16: bool,
    #[serde(serialize_with = "sig17")]
    pub gamma0: T,
    #[serde(serialize_with = "sig17")]
    pub kappa_pmin: T,
}

/// Threshold `gamma0 = -1 - W_{-1}(-n e^{-n}) / n`, `n = ln(N/(N-1))`.
///
/// It is the `gamma` at which `(1/(gamma+1))^(1/gamma) = 1 - 1/N`; for `N = 2`
/// the Lambert argument sits on the branch point and `gamma0 = 1`.
pub fn gamma0<T: Real>(support_size: usize) -> Result<T> {
    if support_size < 2 {
        return Err(FocalError::domain("gamma0", "support of size 1"));
    }
    let nn = T::from_usize_lossy(support_size);
    let n = (nn / (nn - T::one())).ln();
    let w = lambert_wm1(-n * (-n).exp())?;
    Ok(-T::one() - w / n)
}

pub fn sufficient_conditions<T: Real>(gamma: FocusParam<T>, p: &Pmf<T>) -> Result<SufficientConditions<T>> {
    let n = p.support_size();
    if n < 2 {
        return Err(FocalError::domain("sufficient_conditions", "support of size 1"));
    }
    let g = gamma.get();
    let c = -d1_unchecked(gamma, T::one() / T::from_usize_lossy(n));
    let kappa_pmin = kappa(p.p_min())?;
    let g0 = gamma0(n)?;
    Ok(SufficientConditions {
        prop14: p.p_max() * c < T::one(),
        prop15: g > kappa_pmin,
        prop16: g > g0,
        gamma0: g0,
        kappa_pmin,
    })
}

/// Power-law envelope of the binary minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinaryBoundsResult<T: Real> {
    #[serde(serialize_with = "sig17")]
    pub p: T,
    #[serde(serialize_with = "sig17")]
    pub q_gamma: T,
    #[serde(serialize_with = "sig17")]
    pub q_gamma_plus1: T,
    #[serde(serialize_with = "sig17")]
    pub p_star_1: T,
    #[serde(serialize_with = "sig17")]
    pub gap_bound: T,
}

/// `p^(1/g) / (p^(1/g) + (1-p)^(1/g))`.
pub fn power_law<T: Real>(g: T, p: T) -> T {
    let ratio = ((T::one() - p) / p).powf(T::one() / g);
    T::one() / (T::one() + ratio)
}

/// Envelope `q_gamma <= P*_1 <= q_{gamma+1}` for the pmf `[1-p, p]`.
pub fn binary_bounds<T: Real>(gamma: FocusParam<T>, p: T) -> Result<BinaryBoundsResult<T>> {
    if gamma.is_zero() {
        return Err(FocalError::domain("binary_bounds", "gamma must be positive"));
    }
    if !(p > T::zero() && p <= T::c(0.5)) {
        return Err(FocalError::domain("binary_bounds", format!("p = {} must lie in (0, 1/2]", p)));
    }
    let g = gamma.get();
    let pmf = Pmf::from_probs(vec![T::one() - p, p])?;
    let p_star_1 = solve_minimizer(gamma, &pmf)?.p_star.prob(1);
    Ok(BinaryBoundsResult {
        p,
        q_gamma: power_law(g, p),
        q_gamma_plus1: power_law(g + T::one(), p),
        p_star_1,
        gap_bound: (p / (T::one() - p)).ln().abs() / (T::c(4.0) * g * g),
    })
}

/// `H_gamma(p, q)^(1/gamma)` along a grid, and its large-`gamma` target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitDiagnostic<T: Real> {
    pub points: Vec<LimitPoint<T>>,
    /// `max_{x in S} (1 - q(x))`.
    #[serde(serialize_with = "sig17")]
    pub target: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitPoint<T: Real> {
    #[serde(serialize_with = "sig17")]
    pub gamma: T,
    pub value: EntropyValue<T>,
}

pub fn limit_diagnostic<T: Real>(p: &Pmf<T>, q: &Pmf<T>, gamma_grid: &[T]) -> Result<LimitDiagnostic<T>> {
    let qa = q.aligned_to(p)?;
    let target = p.support().map(|i| T::one() - qa[i]).fold(T::zero(), T::max);
    let mut points = Vec::with_capacity(gamma_grid.len());
    for &g in gamma_grid {
        let gamma = FocusParam::new(g)?;
        if gamma.is_zero() {
            return Err(FocalError::domain("limit_diagnostic", "gamma must be positive"));
        }
        let value = match focal_entropy_log(gamma, p, q)? {
            EntropyValue::Infinite => EntropyValue::Infinite,
            EntropyValue::Finite(l) => EntropyValue::Finite((l / g).exp()),
        };
        points.push(LimitPoint { gamma: g, value });
    }
    Ok(LimitDiagnostic { points, target })
}

/// One interior lattice point of the ternary simplex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanCell<T: Real> {
    #[serde(serialize_with = "sig17_seq")]
    pub p: [T; 3],
    /// `None` when the cell's solve failed; see `error`.
    pub alpha_star: Option<T>,
    pub p_gamma_a: Option<T>,
    pub pmin_minus_pa: Option<T>,
    pub d1: Option<T>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTable<T: Real> {
    #[serde(serialize_with = "sig17")]
    pub gamma: T,
    pub resolution: usize,
    pub lattice: &'static str,
    pub cells: Vec<ScanCell<T>>,
    /// Smallest `p_min - p_a` over solved cells.
    pub min_pmin_minus_pa: Option<T>,
    pub min_d1: Option<T>,
    pub failures: usize,
}

pub const SCAN_LATTICE: &str = "points (i,j,k)/resolution with i+j+k = resolution and every coordinate >= 1/(2*resolution)";
pub const SCAN_CSV_HEADER: &str = "p1,p2,p3,alpha_star,p_gamma_a,pmin_minus_pa";

fn scan_cell<T: Real>(gamma: FocusParam<T>, p: [T; 3]) -> ScanCell<T> {
    let attempt = || -> Result<(T, T, T)> {
        let pmf = Pmf::from_probs(p.to_vec())?;
        let report = analyze(gamma, &pmf)?;
        Ok((report.alpha_star, report.p_gamma_a, report.d[0]))
    };
    let p_min = p.iter().copied().fold(T::one(), T::min);
    match attempt() {
        Ok((alpha, pa, d1)) => ScanCell {
            p,
            alpha_star: Some(alpha),
            p_gamma_a: Some(pa),
            pmin_minus_pa: Some(p_min - pa),
            d1: Some(d1),
            error: None,
        },
        Err(e) => ScanCell {
            p,
            alpha_star: None,
            p_gamma_a: None,
            pmin_minus_pa: None,
            d1: None,
            error: Some(e.to_string()),
        },
    }
}

/// Solves every interior lattice point of the 3-simplex at the given resolution.
///
/// Cells run in parallel on the current rayon pool; rows come back in lattice
/// order (`i` descending, then `j` descending).
pub fn simplex_scan<T: Real>(gamma: FocusParam<T>, resolution: usize) -> Result<ScanTable<T>> {
    if gamma.is_zero() {
        return Err(FocalError::domain("simplex_scan", "gamma must be positive"));
    }
    if resolution < 10 {
        return Err(FocalError::domain("simplex_scan", "resolution must be at least 10"));
    }
    let r = T::from_usize_lossy(resolution);
    let floor = T::one() / (T::c(2.0) * r);
    let mut points = Vec::new();
    for i in (0..=resolution).rev() {
        for j in (0..=resolution - i).rev() {
            let k = resolution - i - j;
            let p = [i, j, k].map(|n| T::from_usize_lossy(n) / r);
            if p.iter().all(|&v| v >= floor) {
                points.push(p);
            }
        }
    }
    let cells: Vec<ScanCell<T>> = points.into_par_iter().map(|p| scan_cell(gamma, p)).collect();
    let fold_min = |it: &mut dyn Iterator<Item = T>| it.fold(None, |m: Option<T>, v| Some(m.map_or(v, |m| m.min(v))));
    Ok(ScanTable {
        gamma: gamma.get(),
        resolution,
        lattice: SCAN_LATTICE,
        min_pmin_minus_pa: fold_min(&mut cells.iter().filter_map(|c| c.pmin_minus_pa)),
        min_d1: fold_min(&mut cells.iter().filter_map(|c| c.d1)),
        failures: cells.iter().filter(|c| c.error.is_some()).count(),
        cells,
    })
}

impl<T: Real> ScanTable<T> {
    /// CSV with a `#` comment line describing the lattice, then
    /// `p1,p2,p3,alpha_star,p_gamma_a,pmin_minus_pa`. Failed cells carry `nan`.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# gamma={},resolution={},lattice={}\n{}\n",
            fmt_sig17(self.gamma),
            self.resolution,
            SCAN_LATTICE.replace(',', ";"),
            SCAN_CSV_HEADER
        );
        let opt = |v: Option<T>| v.map_or_else(|| "nan".to_string(), fmt_sig17);
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt_sig17(c.p[0]),
                fmt_sig17(c.p[1]),
                fmt_sig17(c.p[2]),
                opt(c.alpha_star),
                opt(c.p_gamma_a),
                opt(c.pmin_minus_pa)
            ));
        }
        out
    }
}

/// Entropy and divergence-to-uniform comparisons between `p` and `P*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyConsequences {
    /// `H(P*) >= H(p)`.
    pub entropy_increase: bool,
    /// `D(p || U) >= D(P* || U)`.
    pub kl_decrease: bool,
    /// `p_min > p_a`, under which both flags are guaranteed.
    pub precondition_holds: bool,
}

pub fn entropy_consequences<T: Real>(gamma: FocusParam<T>, p: &Pmf<T>) -> Result<EntropyConsequences> {
    let n = p.support_size();
    let minimizer = solve_minimizer(gamma, p)?;
    let p_a = if gamma.is_zero() || n < 2 {
        T::zero()
    } else {
        phi_roots_log(gamma, minimizer.log_alpha_star)?.p_a
    };
    let mut weights = vec![T::zero(); p.len()];
    for i in p.support() {
        weights[i] = T::one();
    }
    let u = Pmf::from_weights(weights)?;
    let slack = T::c(ENTROPY_SLACK);
    let q = &minimizer.p_star;
    let kl = |a: &Pmf<T>| kl_divergence(a, &u).map(|v| v.to_real());
    Ok(EntropyConsequences {
        entropy_increase: shannon_entropy(q) >= shannon_entropy(p) - slack,
        kl_decrease: kl(p)? >= kl(q)? - slack,
        precondition_holds: p.p_min() > p_a,
    })
}
