//! Ranking-based anomaly detection (rankAD).
//!
//! The pipeline estimates multivariate p-values on nominal training data from
//! K-nearest-neighbor graph statistics, distills those ranks into a limited
//! complexity kernel scorer via max-margin learning-to-rank, and flags test
//! points whose predicted score falls in the alpha-percentile of the training
//! scores. Test-stage cost is O(d*s + log n) for s support pairs, instead of
//! the O(d*n) a raw K-NN statistic would pay.
//!
//! Typical flow:
//!
//! ```
//! use rankad::data::Dataset;
//! use rankad::knn::{resampled_nominal_scores, NeighborConfig};
//! use rankad::ranker::{generate_pairs, quantize, train_rank_svm, KernelConfig, TrainConfig};
//! use rankad::detector::fit_detector;
//!
//! # fn main() -> Result<(), rankad::Error> {
//! let train = rankad::synth::sample_mixture(&rankad::synth::GaussianMixtureSpec::toy_sec72(), 80, 7)?;
//! let table = resampled_nominal_scores(&train, &NeighborConfig::default(), 5, 7)?;
//! let ranks = quantize(&table, 3)?;
//! let pairs = generate_pairs(&ranks, Some(500), 7)?;
//! let model = train_rank_svm(&train, &pairs, &TrainConfig::new(10.0, KernelConfig::new(2.0)?))?;
//! let detector = fit_detector(&model, &train)?;
//! let result = detector.classify(&[9.0, 9.0], 0.05)?;
//! # let _ = result;
//! # Ok(())
//! # }
//! ```

pub mod data;
pub mod detector;
pub mod error;
pub mod kernel;
pub mod knn;
pub mod metrics;
pub mod model_selection;
pub mod persistence;
pub mod ranker;
pub mod seed;
pub mod synth;

pub use error::{Error, Result};
