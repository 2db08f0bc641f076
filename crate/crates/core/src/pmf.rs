//! Finite probability mass functions and the functionals defined on them.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{FocalError, Result};
use crate::focal::{focal_loss_unchecked, modulation, FocusParam};
use crate::real::Real;

/// Probability mass function over an ordered list of labels.
///
/// Zero-mass labels are kept but are not part of the support `S`; every
/// functional sums over `S` only.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf<T> {
    labels: Vec<String>,
    probs: Vec<T>,
    /// Indices sorted by descending probability, ties in label order.
    order: Vec<usize>,
}

impl<T: Real> Pmf<T> {
    /// Builds a pmf, renormalizing when the total deviates from one by at
    /// most `T::normalize_tol()` and rejecting larger deviations.
    pub fn new(labels: Vec<String>, probs: Vec<T>) -> Result<Self> {
        if labels.len() != probs.len() {
            return Err(FocalError::InvalidPmf(format!(
                "{} labels for {} probabilities",
                labels.len(),
                probs.len()
            )));
        }
        if probs.is_empty() {
            return Err(FocalError::InvalidPmf("empty".into()));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < T::zero()) {
            return Err(FocalError::InvalidPmf(format!("entry {} is not a probability", bad)));
        }
        let total: T = probs.iter().copied().sum();
        if total <= T::zero() {
            return Err(FocalError::InvalidPmf("empty support".into()));
        }
        if (total - T::one()).abs() > T::normalize_tol() {
            return Err(FocalError::InvalidPmf(format!(
                "probabilities sum to {}, not 1",
                total
            )));
        }
        let mut unique = HashMap::with_capacity(labels.len());
        for l in &labels {
            if unique.insert(l.as_str(), ()).is_some() {
                return Err(FocalError::InvalidPmf(format!("duplicate label {:?}", l)));
            }
        }
        // Totals already within rounding of one are kept bit-exact.
        let probs = if (total - T::one()).abs() <= T::mass_tol() {
            probs
        } else {
            probs.into_iter().map(|p| p / total).collect()
        };
        Ok(Self::assemble(labels, probs))
    }

    /// Labels `0..n` in order.
    pub fn from_probs(probs: Vec<T>) -> Result<Self> {
        let labels = (0..probs.len()).map(|i| i.to_string()).collect();
        Self::new(labels, probs)
    }

    /// Scales arbitrary non-negative weights to unit mass.
    pub fn from_weights(weights: Vec<T>) -> Result<Self> {
        let total: T = weights.iter().copied().sum();
        if !(total > T::zero()) || !total.is_finite() {
            return Err(FocalError::InvalidPmf("weights must have positive finite sum".into()));
        }
        Self::from_probs(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(FocalError::InvalidPmf("empty".into()));
        }
        let v = T::one() / T::from_usize_lossy(n);
        Self::from_weights(vec![v; n])
    }

    /// Same labels as `self`, new probabilities (renormalized, no tolerance check).
    pub(crate) fn with_probs(&self, probs: Vec<T>) -> Self {
        let total: T = probs.iter().copied().sum();
        let probs = probs.into_iter().map(|p| p / total).collect();
        Self::assemble(self.labels.clone(), probs)
    }

    fn assemble(labels: Vec<String>, probs: Vec<T>) -> Self {
        let mut order: Vec<usize> = (0..probs.len()).collect();
        order.sort_by(|&a, &b| probs[b].partial_cmp(&probs[a]).expect("finite"));
        Pmf { labels, probs, order }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob(&self, i: usize) -> T {
        self.probs[i]
    }

    /// Indices of labels with positive mass.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.probs.len()).filter(move |&i| self.probs[i] > T::zero())
    }

    pub fn support_size(&self) -> usize {
        self.support().count()
    }

    pub fn p_min(&self) -> T {
        self.support().map(|i| self.probs[i]).fold(T::infinity(), T::min)
    }

    pub fn p_max(&self) -> T {
        self.probs[self.order[0]]
    }

    /// Indices in descending order of probability.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn sorted_desc(&self) -> Vec<T> {
        self.order.iter().map(|&i| self.probs[i]).collect()
    }

    /// Uniform on its support, up to a relative `tol`.
    pub fn is_uniform_on_support(&self, tol: T) -> bool {
        let (lo, hi) = (self.p_min(), self.p_max());
        hi - lo <= tol * hi
    }

    /// Whether `q` puts mass wherever `self` does.
    pub fn absolutely_continuous_wrt(&self, q: &Pmf<T>) -> Result<bool> {
        let q = q.aligned_to(self)?;
        Ok(self.support().all(|i| q[i] > T::zero()))
    }

    pub fn total_variation(&self, other: &Pmf<T>) -> Result<T> {
        let o = other.aligned_to(self)?;
        Ok(self.probs.iter().zip(&o).map(|(a, b)| (*a - *b).abs()).sum::<T>() / T::c(2.0))
    }

    /// Probabilities of `self` reordered to match `reference`'s labels.
    pub(crate) fn aligned_to(&self, reference: &Pmf<T>) -> Result<Vec<T>> {
        if self.labels == reference.labels {
            return Ok(self.probs.clone());
        }
        if self.len() != reference.len() {
            return Err(FocalError::LabelMismatch(format!(
                "{} labels vs {}",
                self.len(),
                reference.len()
            )));
        }
        let index: HashMap<&str, usize> = self
            .labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        reference
            .labels
            .iter()
            .map(|l| {
                index
                    .get(l.as_str())
                    .map(|&i| self.probs[i])
                    .ok_or_else(|| FocalError::LabelMismatch(format!("label {:?} missing", l)))
            })
            .collect()
    }
}

/// Extended non-negative value: finite, or `+inf` when absolute continuity fails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropyValue<V> {
    Finite(V),
    Infinite,
}

impl<V> EntropyValue<V> {
    pub fn is_finite(&self) -> bool {
        matches!(self, EntropyValue::Finite(_))
    }

    pub fn finite(self) -> Option<V> {
        match self {
            EntropyValue::Finite(v) => Some(v),
            EntropyValue::Infinite => None,
        }
    }
}

impl<T: Real> EntropyValue<T> {
    /// Collapses the sentinel to floating-point infinity.
    pub fn to_real(self) -> T {
        match self {
            EntropyValue::Finite(v) => v,
            EntropyValue::Infinite => T::infinity(),
        }
    }
}

impl<T: Real> Serialize for EntropyValue<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            EntropyValue::Finite(v) => crate::io::Sig17(*v).serialize(s),
            EntropyValue::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Aligned `(p, q)` pairs over the support of `p`, or `None` when `q`
/// vanishes somewhere on it.
fn support_pairs<T: Real>(p: &Pmf<T>, q: &Pmf<T>) -> Result<Option<Vec<(T, T)>>> {
    let q = q.aligned_to(p)?;
    let mut pairs = Vec::with_capacity(p.len());
    for i in p.support() {
        if q[i] <= T::zero() {
            return Ok(None);
        }
        pairs.push((p.probs[i], q[i]));
    }
    Ok(Some(pairs))
}

/// `-sum p ln p` over the support.
pub fn shannon_entropy<T: Real>(p: &Pmf<T>) -> T {
    p.support().map(|i| -p.probs[i] * p.probs[i].ln()).sum()
}

/// `sum p ln(1/q)`, infinite unless `p << q`.
pub fn cross_entropy<T: Real>(p: &Pmf<T>, q: &Pmf<T>) -> Result<EntropyValue<T>> {
    focal_entropy(FocusParam::zero(), p, q)
}

/// Focal-entropy `sum p (1-q)^gamma ln(1/q)`, infinite unless `p << q`.
pub fn focal_entropy<T: Real>(gamma: FocusParam<T>, p: &Pmf<T>, q: &Pmf<T>) -> Result<EntropyValue<T>> {
    Ok(match support_pairs(p, q)? {
        None => EntropyValue::Infinite,
        Some(pairs) => EntropyValue::Finite(
            pairs
                .into_iter()
                .map(|(pp, qq)| pp * focal_loss_unchecked(gamma, qq))
                .sum(),
        ),
    })
}

/// `ln H_gamma(p, q)`, summed in the log domain so that large `gamma` does
/// not underflow. `-inf` when `q = 1` on the whole support of `p`.
pub fn focal_entropy_log<T: Real>(gamma: FocusParam<T>, p: &Pmf<T>, q: &Pmf<T>) -> Result<EntropyValue<T>> {
    let Some(pairs) = support_pairs(p, q)? else {
        return Ok(EntropyValue::Infinite);
    };
    let g = gamma.get();
    let logs: Vec<T> = pairs
        .into_iter()
        .filter(|&(_, qq)| qq < T::one())
        .map(|(pp, qq)| {
            let modulation = if gamma.is_zero() { T::zero() } else { g * (-qq).ln_1p() };
            pp.ln() + modulation + (-qq.ln()).ln()
        })
        .collect();
    let top = logs.iter().copied().fold(T::neg_infinity(), T::max);
    if top == T::neg_infinity() {
        return Ok(EntropyValue::Finite(top));
    }
    Ok(EntropyValue::Finite(top + logs.iter().map(|&l| (l - top).exp()).sum::<T>().ln()))
}

/// First and second derivatives of `gamma -> H_gamma(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaDerivatives<T> {
    /// `E_p[ln(1-q) L_gamma(q)]`, non-positive.
    pub first: T,
    /// `E_p[ln(1-q)^2 L_gamma(q)]`, non-negative.
    pub second: T,
}

pub fn focal_entropy_dgamma<T: Real>(
    gamma: FocusParam<T>,
    p: &Pmf<T>,
    q: &Pmf<T>,
) -> Result<EntropyValue<GammaDerivatives<T>>> {
    let Some(pairs) = support_pairs(p, q)? else {
        return Ok(EntropyValue::Infinite);
    };
    let mut first = T::zero();
    let mut second = T::zero();
    for (pp, qq) in pairs {
        if qq == T::one() {
            continue;
        }
        let log_bar = (-qq).ln_1p();
        let w = pp * focal_loss_unchecked(gamma, qq);
        first = first + log_bar * w;
        second = second + log_bar * log_bar * w;
    }
    Ok(EntropyValue::Finite(GammaDerivatives { first, second }))
}

/// `D(p || q) = sum p ln(p/q)`, infinite unless `p << q`.
pub fn kl_divergence<T: Real>(p: &Pmf<T>, q: &Pmf<T>) -> Result<EntropyValue<T>> {
    Ok(match support_pairs(p, q)? {
        None => EntropyValue::Infinite,
        Some(pairs) => EntropyValue::Finite(
            pairs
                .into_iter()
                .map(|(pp, qq)| pp * (pp / qq).ln())
                .sum::<T>()
                .max(T::zero()),
        ),
    })
}

/// `h_gamma(p) = ln sum p^((1-p)^gamma)`.
pub fn h_gamma<T: Real>(gamma: FocusParam<T>, p: &Pmf<T>) -> T {
    tilt_weights(gamma, p).iter().copied().sum::<T>().ln()
}

fn tilt_weights<T: Real>(gamma: FocusParam<T>, q: &Pmf<T>) -> Vec<T> {
    q.probs
        .iter()
        .map(|&x| {
            if x > T::zero() {
                x.powf(modulation(gamma, x))
            } else {
                T::zero()
            }
        })
        .collect()
}

/// Tilted distribution `q^((1-q)^gamma) / exp(h_gamma(q))`.
pub fn tilt<T: Real>(gamma: FocusParam<T>, q: &Pmf<T>) -> Pmf<T> {
    if gamma.is_zero() {
        return q.clone();
    }
    q.with_probs(tilt_weights(gamma, q))
}

/// `rho = sum p (1-q)^gamma` and the reweighted `r = p (1-q)^gamma / rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoR<T> {
    pub rho: T,
    pub r: Pmf<T>,
}

pub fn rho_and_r<T: Real>(gamma: FocusParam<T>, p: &Pmf<T>, q: &Pmf<T>) -> Result<RhoR<T>> {
    let qa = q.aligned_to(p)?;
    if p.support().any(|i| qa[i] <= T::zero()) {
        return Err(FocalError::AbsoluteContinuity { op: "rho_and_r" });
    }
    let weights: Vec<T> = p
        .probs
        .iter()
        .zip(&qa)
        .map(|(&pp, &qq)| if pp > T::zero() { pp * modulation(gamma, qq) } else { T::zero() })
        .collect();
    let rho: T = weights.iter().copied().sum();
    if rho <= T::zero() {
        return Err(FocalError::domain("rho_and_r", "q = 1 on the whole support of p"));
    }
    Ok(RhoR {
        rho,
        r: p.with_probs(weights),
    })
}

/// `|S| / sum_S 1/p`.
pub fn harmonic_mean<T: Real>(p: &Pmf<T>) -> T {
    let n = T::from_usize_lossy(p.support_size());
    n / p.support().map(|i| T::one() / p.probs[i]).sum::<T>()
}

/// Prefix sums of the descending-sorted `p` dominate those of `q`.
///
/// The shorter vector is padded with zeros; comparisons allow a slack of
/// `T::mass_tol()`.
pub fn majorizes<T: Real>(p: &Pmf<T>, q: &Pmf<T>) -> bool {
    let a = p.sorted_desc();
    let b = q.sorted_desc();
    let n = a.len().max(b.len());
    let (mut sa, mut sb) = (T::zero(), T::zero());
    for i in 0..n {
        sa = sa + a.get(i).copied().unwrap_or_else(T::zero);
        sb = sb + b.get(i).copied().unwrap_or_else(T::zero);
        if sa < sb - T::mass_tol() {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn pmf(v: &[f64]) -> Pmf<f64> {
        Pmf::from_probs(v.to_vec()).unwrap()
    }

    fn fp(g: f64) -> FocusParam<f64> {
        FocusParam::new(g).unwrap()
    }

    fn fin(v: EntropyValue<f64>) -> f64 {
        v.finite().expect("finite")
    }

    #[test]
    fn construction_rules() {
        assert!(Pmf::from_probs(vec![0.5, 0.5 + 1e-10]).is_ok());
        assert!(Pmf::<f64>::from_probs(vec![0.5, 0.6]).is_err());
        assert!(Pmf::<f64>::from_probs(vec![]).is_err());
        assert!(Pmf::<f64>::from_probs(vec![1.5, -0.5]).is_err());
        assert!(Pmf::<f64>::from_probs(vec![f64::NAN, 1.0]).is_err());
        assert!(Pmf::new(vec!["a".into(), "a".into()], vec![0.5, 0.5]).is_err());
        let p = Pmf::from_probs(vec![0.5, 0.5 + 1e-10]).unwrap();
        assert!(p.probs()[1] < 0.5 + 1e-10);
        assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn support_and_order() {
        let p = pmf(&[0.2, 0.0, 0.4, 0.4]);
        assert_eq!(p.support().collect::<Vec<_>>(), vec![0, 2, 3]);
        assert_eq!(p.p_min(), 0.2);
        assert_eq!(p.p_max(), 0.4);
        // ties keep label order
        assert_eq!(p.order(), &[2, 3, 0, 1]);
    }

    #[test]
    fn shannon_values() {
        assert_eq!(shannon_entropy(&pmf(&[0.0, 1.0, 0.0])), 0.0);
        assert!((shannon_entropy(&Pmf::<f64>::uniform(4).unwrap()) - 4f64.ln()).abs() < 1e-15);
        let v = [0.485117, 0.242769, 0.225919, 0.046194];
        let p = Pmf::from_weights(v.to_vec()).unwrap();
        let oracle: f64 = p.probs().iter().map(|x: &f64| -x * x.ln()).sum();
        assert!((shannon_entropy(&p) - oracle).abs() < 1e-15);
        assert!((oracle - 1.1727060987275484).abs() < 1e-14);
    }

    #[test]
    fn cross_entropy_values() {
        let u = Pmf::<f64>::uniform(2).unwrap();
        assert!((fin(cross_entropy(&u, &u).unwrap()) - LN_2).abs() < 1e-15);
        let q = pmf(&[0.0, 1.0]);
        assert_eq!(cross_entropy(&u, &q).unwrap(), EntropyValue::Infinite);
        let p = pmf(&[0.4, 0.58, 0.02]);
        let q = pmf(&[0.2, 0.02, 0.78]);
        let oracle = -(0.4 * 0.2f64.ln() + 0.58 * 0.02f64.ln() + 0.02 * 0.78f64.ln());
        assert!((fin(cross_entropy(&p, &q).unwrap()) - oracle).abs() < 1e-14);
    }

    #[test]
    fn label_alignment_and_mismatch() {
        let p = Pmf::new(vec!["a".into(), "b".into()], vec![0.25, 0.75]).unwrap();
        let q = Pmf::new(vec!["b".into(), "a".into()], vec![0.75, 0.25]).unwrap();
        assert!(fin(kl_divergence(&p, &q).unwrap()).abs() < 1e-15);
        let r = Pmf::new(vec!["a".into(), "c".into()], vec![0.25, 0.75]).unwrap();
        assert!(matches!(cross_entropy(&p, &r), Err(FocalError::LabelMismatch(_))));
        let s = Pmf::<f64>::uniform(3).unwrap();
        assert!(matches!(cross_entropy(&p, &s), Err(FocalError::LabelMismatch(_))));
    }

    #[test]
    fn focal_entropy_values() {
        let p = pmf(&[0.4, 0.58, 0.02]);
        let q = pmf(&[0.2, 0.02, 0.78]);
        assert_eq!(
            focal_entropy(fp(0.0), &p, &q).unwrap(),
            cross_entropy(&p, &q).unwrap()
        );
        let u = Pmf::<f64>::uniform(2).unwrap();
        let h = fin(focal_entropy(fp(3.0), &pmf(&[0.9, 0.1]), &u).unwrap());
        assert!((h - 0.125 * LN_2).abs() < 1e-15);
        let h = fin(focal_entropy(fp(100.0), &p, &q).unwrap());
        assert!((h.powf(0.01) - 0.98806239268361).abs() < 1e-9);
    }

    #[test]
    fn dgamma_values() {
        let u = Pmf::<f64>::uniform(2).unwrap();
        let d = focal_entropy_dgamma(fp(2.0), &pmf(&[0.3, 0.7]), &u).unwrap().finite().unwrap();
        assert!((d.first - 0.5f64.ln() * 0.25 * LN_2).abs() < 1e-15);
        let p = pmf(&[0.4, 0.58, 0.02]);
        let q = pmf(&[0.2, 0.02, 0.78]);
        let g = 1.7;
        let d = focal_entropy_dgamma(fp(g), &p, &q).unwrap().finite().unwrap();
        let h = |g: f64| fin(focal_entropy(fp(g), &p, &q).unwrap());
        let eps = 1e-5;
        let fd1 = (h(g + eps) - h(g - eps)) / (2.0 * eps);
        let fd2 = (h(g + eps) - 2.0 * h(g) + h(g - eps)) / (eps * eps);
        assert!((fd1 - d.first).abs() < 1e-8);
        assert!(((fd2 - d.second) / d.second).abs() < 1e-4);
        assert!(d.first <= 0.0 && d.second >= 0.0);
        let point = pmf(&[0.0, 1.0]);
        assert_eq!(
            focal_entropy_dgamma(fp(1.0), &pmf(&[0.5, 0.5]), &point).unwrap(),
            EntropyValue::Infinite
        );
    }

    #[test]
    fn kl_values() {
        let p = pmf(&[0.1, 0.6, 0.3]);
        assert_eq!(fin(kl_divergence(&p, &p).unwrap()), 0.0);
        let point = pmf(&[0.0, 0.0, 1.0, 0.0]);
        let u = Pmf::<f64>::uniform(4).unwrap();
        assert!((fin(kl_divergence(&point, &u).unwrap()) - 4f64.ln()).abs() < 1e-15);
        let q = pmf(&[0.3, 0.3, 0.4]);
        let lhs = fin(kl_divergence(&p, &q).unwrap());
        let rhs = fin(cross_entropy(&p, &q).unwrap()) - shannon_entropy(&p);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn h_gamma_values() {
        let p = pmf(&[0.2, 0.5, 0.3]);
        assert!(h_gamma(fp(0.0), &p).abs() < 1e-15);
        let u = Pmf::<f64>::uniform(2).unwrap();
        assert!((h_gamma(fp(1.0), &u) - 0.5 * LN_2).abs() < 1e-15);
        let cap = (1f64 / std::f64::consts::E).exp();
        for &g in &[0.1, 1.0, 3.0] {
            assert!(h_gamma(fp(g), &p) <= cap * g);
        }
    }

    #[test]
    fn tilt_properties() {
        let q = pmf(&[0.2, 0.5, 0.3]);
        assert_eq!(tilt(fp(0.0), &q), q);
        let u = Pmf::<f64>::uniform(5).unwrap();
        let t = tilt(fp(2.5), &u);
        for (a, b) in t.probs().iter().zip(u.probs()) {
            assert!((a - b).abs() < 1e-15);
        }
        let p = pmf(&[0.6, 0.1, 0.3]);
        let g = fp(1.3);
        let t = tilt(g, &q);
        assert!((t.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let lhs = fin(focal_entropy(g, &p, &q).unwrap());
        let rhs = fin(cross_entropy(&p, &t).unwrap()) - h_gamma(g, &q);
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn rho_r_values() {
        let p = pmf(&[0.6, 0.1, 0.3]);
        let q = pmf(&[0.2, 0.5, 0.3]);
        let rr = rho_and_r(fp(0.0), &p, &q).unwrap();
        assert_eq!(rr.rho, 1.0);
        assert_eq!(rr.r, p);
        let u = Pmf::<f64>::uniform(3).unwrap();
        let rr = rho_and_r(fp(2.0), &p, &u).unwrap();
        assert!((rr.rho - (2.0f64 / 3.0).powi(2)).abs() < 1e-15);
        assert!(rr.r.total_variation(&p).unwrap() < 1e-15);
        let g = fp(0.7);
        let rr = rho_and_r(g, &p, &q).unwrap();
        let lhs = fin(focal_entropy(g, &p, &q).unwrap());
        let rhs = rr.rho * (fin(kl_divergence(&rr.r, &q).unwrap()) + shannon_entropy(&rr.r));
        assert!((lhs - rhs).abs() < 1e-10);
        let gap = pmf(&[0.0, 0.5, 0.5]);
        assert!(matches!(
            rho_and_r(g, &p, &gap),
            Err(FocalError::AbsoluteContinuity { .. })
        ));
    }

    #[test]
    fn harmonic_mean_values() {
        assert!((harmonic_mean(&Pmf::<f64>::uniform(7).unwrap()) - 1.0 / 7.0).abs() < 1e-15);
        let hm = harmonic_mean(&pmf(&[0.65, 0.35]));
        assert!((hm - 2.0 / (1.0 / 0.65 + 1.0 / 0.35)).abs() < 1e-15);
        assert!((hm - 0.455).abs() < 1e-12);
        assert!(harmonic_mean(&pmf(&[0.1, 0.2, 0.7])) <= 1.0 / 3.0);
    }

    #[test]
    fn majorization_examples() {
        let p = pmf(&[0.485, 0.243, 0.226, 0.046]);
        assert!(majorizes(&p, &p));
        assert!(majorizes(&pmf(&[0.0, 1.0, 0.0]), &Pmf::<f64>::uniform(3).unwrap()));
        assert!(!majorizes(&Pmf::<f64>::uniform(3).unwrap(), &pmf(&[0.0, 1.0, 0.0])));
        let q = pmf(&[0.4418, 0.2619, 0.2460, 0.0503]);
        assert!(majorizes(&p, &q));
        assert!(!majorizes(&q, &p));
        // padding with zeros
        assert!(majorizes(&pmf(&[0.7, 0.3]), &pmf(&[0.5, 0.3, 0.2])));
    }

    #[test]
    fn single_precision_smoke() {
        let p = Pmf::<f32>::from_probs(vec![0.25, 0.75]).unwrap();
        let q = Pmf::<f32>::uniform(2).unwrap();
        let h = focal_entropy(FocusParam::new(1.0f32).unwrap(), &p, &q).unwrap().finite().unwrap();
        assert!((h - 0.5 * std::f32::consts::LN_2).abs() < 1e-6);
    }
}
