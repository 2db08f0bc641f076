//! Desk-scale class-imbalance experiments: a synthetic two-feature
//! classification task with a known posterior, binned MNIST zoning
//! features, a one-hidden-layer network trained with the focal loss, and the
//! comparison of learned posteriors against the focal-entropy minimizer.

mod compare;
mod dataset;
mod error;
mod mnist;
mod synthetic;
mod train;

pub use compare::{compare_posteriors, BinGap, Comparison, DEFAULT_MIN_COUNT};
pub use dataset::{bin_index, BinnedDataset, PosteriorTable, Sample, BINS, POSTERIOR_CSV_HEADER};
pub use error::{ExperimentError, Result};
pub use mnist::{
    ingest_mnist, ingest_mnist_bytes, nearest_rank_cuts, parse_idx_images, parse_idx_labels, quantize, IdxImages,
    MnistIngest, IMAGE_MAGIC, LABEL_MAGIC, RATIO_EPS,
};
pub use synthetic::{sample_synthetic, synthetic_posterior, theory_table, theory_target, SyntheticSpec};
pub use train::{
    focal_logit_grad, train_classifier, train_classifier_observed, train_seeds, Network, TrainConfig, TrainRun,
};
