#![allow(dead_code)]

use focal_core::{FocusParam, Pmf};
use proptest::prelude::*;

pub fn fp(g: f64) -> FocusParam<f64> {
    FocusParam::new(g).unwrap()
}

pub fn pmf(v: &[f64]) -> Pmf<f64> {
    Pmf::from_probs(v.to_vec()).unwrap()
}

/// Weights spread over several orders of magnitude so that small entries occur.
pub fn any_pmf(min_len: usize, max_len: usize) -> impl Strategy<Value = Pmf<f64>> {
    prop::collection::vec(-5.0f64..0.0, min_len..=max_len)
        .prop_map(|logs| Pmf::from_weights(logs.into_iter().map(f64::exp).collect()).unwrap())
}

pub fn any_gamma() -> impl Strategy<Value = f64> {
    prop_oneof![0.01f64..1.0, 1.0f64..10.0, 10.0f64..60.0]
}

pub fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}
