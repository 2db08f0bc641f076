use focal_core::{solve_minimizer, FocusParam, Pmf};
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dataset::{bin_index, BinnedDataset, PosteriorTable, Sample, BINS};
use crate::error::{ExperimentError, Result};

/// Class prior and class-conditional feature tables of the synthetic task.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyntheticSpec {
    pub class_prior: [f64; 2],
    /// `f1_given_c[c][v] = P[F1 = v | C = c]`.
    pub f1_given_c: [[f64; 4]; 2],
    pub f2_given_c: [[f64; 4]; 2],
    pub sample_count: usize,
    pub seed: u64,
}

impl SyntheticSpec {
    /// The imbalanced configuration with prior `[0.95, 0.05]`.
    pub fn reference(sample_count: usize, seed: u64) -> Self {
        Self {
            class_prior: [0.95, 0.05],
            f1_given_c: [[0.65, 0.20, 0.10, 0.05], [0.10, 0.25, 0.45, 0.20]],
            f2_given_c: [[0.50, 0.30, 0.15, 0.05], [0.20, 0.50, 0.20, 0.10]],
            sample_count,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rows = std::iter::once(&self.class_prior[..])
            .chain(self.f1_given_c.iter().map(|r| &r[..]))
            .chain(self.f2_given_c.iter().map(|r| &r[..]));
        for row in rows {
            let total: f64 = row.iter().sum();
            if row.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) || (total - 1.0).abs() > 1e-9 {
                return Err(ExperimentError::Invalid(format!("{:?} is not a distribution", row)));
            }
        }
        Ok(())
    }

    fn joint(&self, f1: usize, f2: usize, c: usize) -> f64 {
        self.class_prior[c] * self.f1_given_c[c][f1] * self.f2_given_c[c][f2]
    }
}

/// Exact `P[C | F1, F2]` by Bayes' rule on the factorized joint.
pub fn synthetic_posterior(spec: &SyntheticSpec) -> Result<PosteriorTable> {
    spec.validate()?;
    let mut rows = vec![None; BINS];
    for f1 in 0..4 {
        for f2 in 0..4 {
            let j = [spec.joint(f1, f2, 0), spec.joint(f1, f2, 1)];
            let total = j[0] + j[1];
            if total > 0.0 {
                rows[bin_index(f1 as u8, f2 as u8)] = Some([j[0] / total, j[1] / total]);
            }
        }
    }
    PosteriorTable::new(rows)
}

/// Focal-entropy minimizer of one posterior row.
pub fn theory_target(gamma: FocusParam<f64>, posterior_row: &Pmf<f64>) -> Result<Pmf<f64>> {
    Ok(solve_minimizer(gamma, posterior_row)?.p_star)
}

/// `theory_target` applied to every defined row.
pub fn theory_table(gamma: FocusParam<f64>, posterior: &PosteriorTable) -> Result<PosteriorTable> {
    let rows = posterior
        .rows
        .iter()
        .map(|row| {
            row.map(|r| {
                let q = theory_target(gamma, &Pmf::from_probs(r.to_vec())?)?;
                Ok([q.prob(0), q.prob(1)])
            })
            .transpose()
        })
        .collect::<Result<Vec<_>>>()?;
    PosteriorTable::new(rows)
}

/// Draws `C`, then `F1` and `F2` independently given `C`.
pub fn sample_synthetic(spec: &SyntheticSpec) -> Result<BinnedDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let dist = |w: &[f64]| WeightedIndex::new(w).map_err(|e| ExperimentError::Invalid(e.to_string()));
    let prior = dist(&spec.class_prior)?;
    let f1 = [dist(&spec.f1_given_c[0])?, dist(&spec.f1_given_c[1])?];
    let f2 = [dist(&spec.f2_given_c[0])?, dist(&spec.f2_given_c[1])?];
    let samples = (0..spec.sample_count)
        .map(|_| {
            let c = prior.sample(&mut rng);
            Sample {
                f1: f1[c].sample(&mut rng) as u8,
                f2: f2[c].sample(&mut rng) as u8,
                c: c as u8,
            }
        })
        .collect();
    BinnedDataset::new(samples)
}
