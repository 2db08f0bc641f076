use serde::Serialize;

use crate::dataset::{PosteriorTable, BINS};
use crate::error::{ExperimentError, Result};

/// Bins with fewer samples are left out of the comparison.
pub const DEFAULT_MIN_COUNT: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinGap {
    pub f1_bin: u8,
    pub f2_bin: u8,
    pub count: usize,
    /// `None` when the bin is excluded or either row is undefined.
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub max_abs_gap: f64,
    pub compared_bins: usize,
    pub per_bin: Vec<BinGap>,
}

/// Largest entrywise `|learned - theory|` over bins with at least `min_count` samples.
pub fn compare_posteriors(
    learned: &PosteriorTable,
    theory: &PosteriorTable,
    counts: &[usize],
    min_count: usize,
) -> Result<Comparison> {
    if learned.rows.len() != BINS || theory.rows.len() != BINS || counts.len() != BINS {
        return Err(ExperimentError::Shape(format!(
            "tables of {}, {} rows and {} counts",
            learned.rows.len(),
            theory.rows.len(),
            counts.len()
        )));
    }
    let per_bin: Vec<BinGap> = (0..BINS)
        .map(|i| {
            let gap = match (learned.rows[i], theory.rows[i]) {
                (Some(a), Some(b)) if counts[i] >= min_count => Some((a[0] - b[0]).abs().max((a[1] - b[1]).abs())),
                _ => None,
            };
            BinGap {
                f1_bin: (i / 4) as u8,
                f2_bin: (i % 4) as u8,
                count: counts[i],
                gap,
            }
        })
        .collect();
    Ok(Comparison {
        max_abs_gap: per_bin.iter().filter_map(|b| b.gap).fold(0.0, f64::max),
        compared_bins: per_bin.iter().filter(|b| b.gap.is_some()).count(),
        per_bin,
    })
}
