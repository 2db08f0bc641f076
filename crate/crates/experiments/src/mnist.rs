use std::path::Path;

use serde::Serialize;

use crate::dataset::{BinnedDataset, Sample};
use crate::error::{ExperimentError, Result};

pub const IMAGE_MAGIC: u32 = 2051;
pub const LABEL_MAGIC: u32 = 2049;
/// Added to the total intensity before forming half-image ratios.
pub const RATIO_EPS: f64 = 1e-9;

/// Unsigned-byte images in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct IdxImages {
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

impl IdxImages {
    pub fn len(&self) -> usize {
        self.pixels.len() / (self.rows * self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn image(&self, i: usize) -> &[u8] {
        let n = self.rows * self.cols;
        &self.pixels[i * n..(i + 1) * n]
    }
}

fn be_u32(bytes: &[u8], at: usize) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| ExperimentError::Format("truncated header".into()))
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<IdxImages> {
    let magic = be_u32(bytes, 0)?;
    if magic != IMAGE_MAGIC {
        return Err(ExperimentError::Format(format!("image magic {} != {}", magic, IMAGE_MAGIC)));
    }
    let n = be_u32(bytes, 4)? as usize;
    let rows = be_u32(bytes, 8)? as usize;
    let cols = be_u32(bytes, 12)? as usize;
    if rows == 0 || cols == 0 {
        return Err(ExperimentError::Format(format!("image dimensions {}x{}", rows, cols)));
    }
    let body = &bytes[16..];
    let want = n * rows * cols;
    if body.len() < want {
        return Err(ExperimentError::Format(format!("{} pixel bytes, header promises {}", body.len(), want)));
    }
    Ok(IdxImages {
        rows,
        cols,
        pixels: body[..want].to_vec(),
    })
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let magic = be_u32(bytes, 0)?;
    if magic != LABEL_MAGIC {
        return Err(ExperimentError::Format(format!("label magic {} != {}", magic, LABEL_MAGIC)));
    }
    let n = be_u32(bytes, 4)? as usize;
    let body = &bytes[8..];
    if body.len() < n {
        return Err(ExperimentError::Format(format!("{} label bytes, header promises {}", body.len(), n)));
    }
    Ok(body[..n].to_vec())
}

/// Upper-half and left-half intensity shares of one image.
fn zoning_features(img: &[u8], rows: usize, cols: usize) -> (f64, f64) {
    let (mut total, mut upper, mut left) = (0u64, 0u64, 0u64);
    for r in 0..rows {
        for c in 0..cols {
            let v = img[r * cols + c] as u64;
            total += v;
            if r < rows / 2 {
                upper += v;
            }
            if c < cols / 2 {
                left += v;
            }
        }
    }
    let denom = total as f64 + RATIO_EPS;
    (upper as f64 / denom, left as f64 / denom)
}

/// Nearest-rank 25/50/75 percentiles.
pub fn nearest_rank_cuts(values: &[f64]) -> [f64; 3] {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite features"));
    let n = sorted.len();
    [1usize, 2, 3].map(|k| {
        if n == 0 {
            return 0.0;
        }
        let rank = (k * n).div_ceil(4).max(1);
        sorted[rank - 1]
    })
}

/// Bin of `x`: the number of cut points strictly below it, so ties go low.
pub fn quantize(x: f64, cuts: &[f64; 3]) -> u8 {
    cuts.iter().filter(|&&c| x > c).count() as u8
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MnistIngest {
    pub dataset: BinnedDataset,
    pub cuts_f1: [f64; 3],
    pub cuts_f2: [f64; 3],
    /// `[not digit 1, digit 1]`.
    pub class_counts: [usize; 2],
}

/// Binned zoning features with `C = 1` iff the digit is 1.
pub fn ingest_mnist_bytes(images: &[u8], labels: &[u8]) -> Result<MnistIngest> {
    let images = parse_idx_images(images)?;
    let labels = parse_idx_labels(labels)?;
    if images.len() != labels.len() {
        return Err(ExperimentError::Format(format!(
            "{} images but {} labels",
            images.len(),
            labels.len()
        )));
    }
    let feats: Vec<(f64, f64)> = (0..images.len())
        .map(|i| zoning_features(images.image(i), images.rows, images.cols))
        .collect();
    let f1: Vec<f64> = feats.iter().map(|f| f.0).collect();
    let f2: Vec<f64> = feats.iter().map(|f| f.1).collect();
    let (cuts_f1, cuts_f2) = (nearest_rank_cuts(&f1), nearest_rank_cuts(&f2));
    let samples = feats
        .iter()
        .zip(&labels)
        .map(|(&(a, b), &digit)| Sample {
            f1: quantize(a, &cuts_f1),
            f2: quantize(b, &cuts_f2),
            c: u8::from(digit == 1),
        })
        .collect();
    let dataset = BinnedDataset::new(samples)?;
    let class_counts = dataset.class_counts();
    log::info!("ingested {} images, class counts {:?}", dataset.len(), class_counts);
    Ok(MnistIngest {
        dataset,
        cuts_f1,
        cuts_f2,
        class_counts,
    })
}

pub fn ingest_mnist(images_path: &Path, labels_path: &Path) -> Result<MnistIngest> {
    let read = |p: &Path| {
        std::fs::read(p).map_err(|source| ExperimentError::Io {
            path: p.display().to_string(),
            source,
        })
    };
    ingest_mnist_bytes(&read(images_path)?, &read(labels_path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank() {
        let v: Vec<f64> = (1..=8).map(f64::from).collect();
        assert_eq!(nearest_rank_cuts(&v), [2.0, 4.0, 6.0]);
        let v: Vec<f64> = (1..=5).map(f64::from).collect();
        assert_eq!(nearest_rank_cuts(&v), [2.0, 3.0, 4.0]);
    }

    #[test]
    fn ties_go_low() {
        let cuts = [0.2, 0.5, 0.7];
        assert_eq!(quantize(0.2, &cuts), 0);
        assert_eq!(quantize(0.21, &cuts), 1);
        assert_eq!(quantize(0.7, &cuts), 2);
        assert_eq!(quantize(0.9, &cuts), 3);
    }

    #[test]
    fn feature_halves() {
        // 2x2: top-left bright only.
        let (u, l) = zoning_features(&[10, 0, 0, 0], 2, 2);
        assert!((u - 1.0).abs() < 1e-9 && (l - 1.0).abs() < 1e-9);
        let (u, l) = zoning_features(&[0, 0, 0, 0], 2, 2);
        assert_eq!((u, l), (0.0, 0.0));
    }
}
