//! Text formats: fixed 17-significant-digit numbers, pmf JSON and CSV.

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{FocalError, Result};
use crate::pmf::Pmf;
use crate::real::Real;

/// Formats a scalar with 17 significant digits in scientific notation.
///
/// Non-finite values become `inf`, `-inf` or `nan`.
pub fn fmt_sig17<T: Real>(x: T) -> String {
    let v = x.as_f64();
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{:.16e}", v)
    }
}

/// Serializes the wrapped scalar as a bare JSON number with 17 significant
/// digits (`null` when not finite).
#[derive(Debug, Clone, Copy)]
pub struct Sig17<T>(pub T);

impl<T: Real> Serialize for Sig17<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(fmt_sig17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

/// `serialize_with` helper for scalar fields.
pub fn sig17<T: Real, S: Serializer>(x: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    Sig17(*x).serialize(s)
}

/// `serialize_with` helper for scalar sequences.
pub fn sig17_seq<T: Real, S: Serializer>(xs: &[T], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| Sig17(*x)))
}

/// `serialize_with` helper for optional scalars.
pub fn sig17_opt<T: Real, S: Serializer>(x: &Option<T>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => Sig17(*v).serialize(s),
        None => s.serialize_none(),
    }
}

impl<T: Real> Serialize for Pmf<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a, T: Real> {
            labels: &'a [String],
            #[serde(serialize_with = "sig17_seq")]
            probs: &'a [T],
        }
        Wire {
            labels: self.labels(),
            probs: self.probs(),
        }
        .serialize(s)
    }
}

#[derive(Deserialize)]
struct PmfWire {
    labels: Option<Vec<serde_json::Value>>,
    probs: Vec<f64>,
}

impl<T: Real> Pmf<T> {
    /// `{"labels":[...],"probs":[...]}`; labels may be omitted.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("pmf serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: PmfWire =
            serde_json::from_str(text).map_err(|e| FocalError::InvalidPmf(format!("json: {e}")))?;
        let probs: Vec<T> = wire.probs.into_iter().map(T::c).collect();
        match wire.labels {
            None => Pmf::from_probs(probs),
            Some(labels) => {
                let labels = labels
                    .into_iter()
                    .map(|v| match v {
                        serde_json::Value::String(s) => s,
                        other => other.to_string(),
                    })
                    .collect();
                Pmf::new(labels, probs)
            }
        }
    }

    /// Single column with header `prob`; labels are implicit `0..n`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("prob\n");
        for &p in self.probs() {
            out.push_str(&fmt_sig17(p));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut probs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (n == 0 && line.eq_ignore_ascii_case("prob")) {
                continue;
            }
            let v: f64 = line
                .parse()
                .map_err(|_| FocalError::InvalidPmf(format!("csv line {}: {:?}", n + 1, line)))?;
            probs.push(T::c(v));
        }
        Pmf::from_probs(probs)
    }
}
