use focal_core::io::fmt_sig17;
use serde::Serialize;

use crate::error::{ExperimentError, Result};

/// Number of `(f1, f2)` cells; each feature takes four values.
pub const BINS: usize = 16;
pub const POSTERIOR_CSV_HEADER: &str = "f1_bin,f2_bin,count,p_c0,p_c1";

pub fn bin_index(f1: u8, f2: u8) -> usize {
    f1 as usize * 4 + f2 as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Sample {
    pub f1: u8,
    pub f2: u8,
    pub c: u8,
}

/// `P[C | F1, F2]` for the 16 cells in `bin_index` order; `None` where undefined.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorTable {
    pub rows: Vec<Option<[f64; 2]>>,
}

impl PosteriorTable {
    pub fn new(rows: Vec<Option<[f64; 2]>>) -> Result<Self> {
        if rows.len() != BINS {
            return Err(ExperimentError::Shape(format!("{} posterior rows, expected {}", rows.len(), BINS)));
        }
        Ok(Self { rows })
    }

    pub fn row(&self, f1: u8, f2: u8) -> Option<[f64; 2]> {
        self.rows[bin_index(f1, f2)]
    }

    /// CSV with header `f1_bin,f2_bin,count,p_c0,p_c1`; undefined rows carry `nan`.
    pub fn to_csv(&self, counts: &[usize]) -> String {
        let mut out = String::from(POSTERIOR_CSV_HEADER);
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            let (a, b) = match row {
                Some([a, b]) => (fmt_sig17(*a), fmt_sig17(*b)),
                None => ("nan".into(), "nan".into()),
            };
            let count = counts.get(i).copied().unwrap_or(0);
            out.push_str(&format!("{},{},{},{},{}\n", i / 4, i % 4, count, a, b));
        }
        out
    }
}

/// Labelled samples over the 4x4 feature grid with per-cell class counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinnedDataset {
    pub samples: Vec<Sample>,
    /// `counts[bin][c]`.
    pub counts: Vec<[usize; 2]>,
}

impl BinnedDataset {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        let mut counts = vec![[0usize; 2]; BINS];
        for s in &samples {
            if s.f1 > 3 || s.f2 > 3 || s.c > 1 {
                return Err(ExperimentError::Invalid(format!("sample {:?} outside the 4x4x2 grid", s)));
            }
            counts[bin_index(s.f1, s.f2)][s.c as usize] += 1;
        }
        Ok(Self { samples, counts })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn bin_counts(&self) -> Vec<usize> {
        self.counts.iter().map(|c| c[0] + c[1]).collect()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        self.counts.iter().fold([0, 0], |acc, c| [acc[0] + c[0], acc[1] + c[1]])
    }

    pub fn empirical_posterior(&self) -> PosteriorTable {
        let rows = self
            .counts
            .iter()
            .map(|&[a, b]| {
                let n = (a + b) as f64;
                (a + b > 0).then(|| [a as f64 / n, b as f64 / n])
            })
            .collect();
        PosteriorTable { rows }
    }

    pub fn to_csv(&self) -> String {
        self.empirical_posterior().to_csv(&self.bin_counts())
    }
}
