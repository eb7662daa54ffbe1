//! Cross-validated selection of the cost C and kernel bandwidth sigma.
//!
//! Points are partitioned into seeded folds. For every (C, sigma) cell a
//! model is trained on the pairs generated from the training folds' levels
//! and judged by the weighted pairwise disagreement loss on the pairs wholly
//! inside the held-out fold. Fold assignment is by point, not by pair, so no
//! pair straddles the train/test boundary.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::kernel::KernelConfig;
use crate::knn::{leave_one_out_statistics, NeighborConfig, NominalScoreTable};
use crate::ranker::{
    generate_pairs, quantize, train_rank_svm, PreferencePairSet, RankModel, TrainConfig,
};
use crate::seed::{derive_seed, rng_for};
use rand::seq::SliceRandom;
use rayon::prelude::*;

/// A ranker whose decision-value spread over the held-out fold falls below
/// this is treated as constant and penalized with loss 1: a constant scorer
/// ranks nothing, but the strict '<' in the loss would score it 0.
const CONSTANT_MODEL_RANGE: f64 = 1e-10;

/// Search grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CvGrid {
    pub c_values: Vec<f64>,
    pub sigma_values: Vec<f64>,
    pub folds: usize,
}

impl CvGrid {
    pub fn new(c_values: Vec<f64>, sigma_values: Vec<f64>, folds: usize) -> Result<Self> {
        if c_values.is_empty() || sigma_values.is_empty() {
            return Err(Error::param("grid", "C and sigma grids must be nonempty"));
        }
        if c_values.iter().chain(&sigma_values).any(|&v| !(v > 0.0)) {
            return Err(Error::param("grid", "all grid values must be positive"));
        }
        if folds < 2 {
            return Err(Error::param("folds", "need at least 2 folds"));
        }
        Ok(CvGrid {
            c_values,
            sigma_values,
            folds,
        })
    }

    /// The 1-3-10 cost ladder from 0.001 to 1000.
    pub fn default_c_ladder() -> Vec<f64> {
        vec![
            0.001, 0.003, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1000.0,
        ]
    }
}

/// Solver settings applied to every cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvControls {
    /// Quantization level count.
    pub m: u32,
    /// Cap on generated training pairs per fold.
    pub cap: Option<usize>,
    pub tol: f64,
    pub max_passes: usize,
    pub seed: u64,
}

impl Default for CvControls {
    fn default() -> Self {
        CvControls {
            m: 3,
            cap: None,
            tol: 1e-4,
            max_passes: 1000,
            seed: 0,
        }
    }
}

/// One evaluated grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CvCell {
    pub c: f64,
    pub sigma: f64,
    /// Loss per evaluated fold.
    pub fold_losses: Vec<f64>,
    /// Mean loss; `None` when every fold was skipped.
    pub mean_loss: Option<f64>,
}

/// Grid evaluation summary.
#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub cells: Vec<CvCell>,
    pub best_c: f64,
    pub best_sigma: f64,
    pub best_loss: f64,
    /// Folds unusable because one side had a single quantization level.
    pub skipped_folds: usize,
}

impl CvReport {
    /// One-standard-error variant of the selection: among cells whose mean
    /// loss is within one standard error of the best cell, take the largest
    /// sigma, breaking ties toward the smallest C. The quantized rank
    /// targets are noisy, so cells inside that band are statistically
    /// indistinguishable and the smoothest of them is the conservative pick.
    /// Returns (C, sigma).
    pub fn select_one_se(&self) -> (f64, f64) {
        let best = self
            .cells
            .iter()
            .filter(|c| c.mean_loss.is_some())
            .min_by(|a, b| a.mean_loss.unwrap().total_cmp(&b.mean_loss.unwrap()));
        let Some(best) = best else {
            return (self.best_c, self.best_sigma);
        };
        let mean = best.mean_loss.unwrap();
        let k = best.fold_losses.len() as f64;
        let se = if k > 1.0 {
            let var =
                best.fold_losses.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (k - 1.0);
            (var / k).sqrt()
        } else {
            0.0
        };
        let threshold = mean + se;
        self.cells
            .iter()
            .filter(|c| c.mean_loss.is_some_and(|l| l <= threshold))
            .max_by(|a, b| a.sigma.total_cmp(&b.sigma).then(b.c.total_cmp(&a.c)))
            .map(|c| (c.c, c.sigma))
            .unwrap_or((self.best_c, self.best_sigma))
    }
}

/// Seeded partition of 0..n into near-equal folds.
fn fold_partition(n: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut rng_for(seed, 0xf01d));
    (0..folds)
        .map(|f| indices[f * n / folds..(f + 1) * n / folds].to_vec())
        .collect()
}

/// Weighted pairwise disagreement loss of a model on held-out pairs.
///
/// Counts pairs whose required order g(x_i) > g(x_j) is strictly reversed,
/// normalized by the pair count. Ties contribute nothing; a constant model
/// therefore scores 0 here and is penalized separately during grid search.
pub fn wpdl(model: &RankModel, s: &Dataset, holdout: &PreferencePairSet) -> Result<f64> {
    if holdout.pairs.is_empty() {
        return Err(Error::param("holdout", "held-out pair set is empty"));
    }
    let g: Vec<f64> = s
        .iter()
        .map(|x| model.decision_value(x))
        .collect::<Result<_>>()?;
    let disagreements = holdout
        .pairs
        .iter()
        .filter(|&&(i, j)| g[i] < g[j])
        .count();
    Ok(disagreements as f64 / holdout.pairs.len() as f64)
}

/// Bandwidth grid { 2^i * D : i = -10..10 } around the mean leave-one-out
/// average k-NN distance D of the sample.
pub fn default_sigma_grid(s: &Dataset, k: usize) -> Result<Vec<f64>> {
    if s.n() <= k {
        return Err(Error::DatasetTooSmall {
            n: s.n(),
            message: format!("sigma grid needs more than k = {k} points"),
        });
    }
    let stats = leave_one_out_statistics(s, &NeighborConfig::mean_first_k(k))?;
    let d_mean = stats.iter().sum::<f64>() / stats.len() as f64;
    if !(d_mean > 0.0) {
        return Err(Error::InvalidInput(
            "all points identical: average neighbor distance is zero".to_string(),
        ));
    }
    Ok((-10..=10).map(|i| (i as f64).exp2() * d_mean).collect())
}

struct FoldData {
    train: Dataset,
    train_pairs: PreferencePairSet,
    holdout: Dataset,
    holdout_pairs: PreferencePairSet,
}

/// Evaluate every (C, sigma) cell by k-fold cross-validation and pick the
/// argmin; ties break toward smaller C, then smaller sigma.
pub fn cross_validate(
    s: &Dataset,
    table: &NominalScoreTable,
    grid: &CvGrid,
    controls: &CvControls,
) -> Result<CvReport> {
    let n = s.n();
    if n < grid.folds {
        return Err(Error::DatasetTooSmall {
            n,
            message: format!("cannot split into {} folds", grid.folds),
        });
    }
    let ranks = quantize(table, controls.m)?;

    // Seeded fold assignment, identical for every cell.
    let partition = fold_partition(n, grid.folds, controls.seed);

    let mut folds: Vec<FoldData> = Vec::new();
    let mut skipped_folds = 0usize;
    for f in 0..grid.folds {
        let holdout_idx = partition[f].clone();
        let train_idx: Vec<usize> = (0..grid.folds)
            .filter(|&other| other != f)
            .flat_map(|other| partition[other].iter().copied())
            .collect();
        match build_fold(s, &ranks.levels, ranks.m, &train_idx, &holdout_idx, controls, f) {
            Some(fold) => folds.push(fold),
            None => skipped_folds += 1,
        }
    }
    if folds.is_empty() {
        return Err(Error::AllCellsSkipped);
    }

    let cells: Vec<(f64, f64)> = grid
        .c_values
        .iter()
        .flat_map(|&c| grid.sigma_values.iter().map(move |&sigma| (c, sigma)))
        .collect();

    let evaluated: Vec<CvCell> = cells
        .par_iter()
        .map(|&(c, sigma)| evaluate_cell(c, sigma, &folds, controls))
        .collect::<Result<_>>()?;

    let best = evaluated
        .iter()
        .filter(|cell| cell.mean_loss.is_some())
        .min_by(|a, b| {
            a.mean_loss
                .unwrap()
                .total_cmp(&b.mean_loss.unwrap())
                .then(a.c.total_cmp(&b.c))
                .then(a.sigma.total_cmp(&b.sigma))
        })
        .ok_or(Error::AllCellsSkipped)?;

    Ok(CvReport {
        best_c: best.c,
        best_sigma: best.sigma,
        best_loss: best.mean_loss.unwrap(),
        cells: evaluated.clone(),
        skipped_folds,
    })
}

fn build_fold(
    s: &Dataset,
    levels: &[u32],
    m: u32,
    train_idx: &[usize],
    holdout_idx: &[usize],
    controls: &CvControls,
    fold_no: usize,
) -> Option<FoldData> {
    let local_ranks = |idx: &[usize]| crate::ranker::QuantizedRanks {
        levels: idx.iter().map(|&i| levels[i]).collect(),
        m,
    };
    let train_pairs = generate_pairs(
        &local_ranks(train_idx),
        controls.cap,
        derive_seed(controls.seed, 0xbeef + fold_no as u64),
    )
    .ok()?;
    let holdout_pairs = generate_pairs(&local_ranks(holdout_idx), None, 0).ok()?;
    Some(FoldData {
        train: s.subset(train_idx).ok()?,
        train_pairs,
        holdout: s.subset(holdout_idx).ok()?,
        holdout_pairs,
    })
}

// The per-fold train seed is shared by every cell so that duplicated (C,
// sigma) grid entries evaluate to identical losses.
fn evaluate_cell(
    c: f64,
    sigma: f64,
    folds: &[FoldData],
    controls: &CvControls,
) -> Result<CvCell> {
    let kernel = KernelConfig::new(sigma)?;
    let mut fold_losses = Vec::with_capacity(folds.len());
    for (f, fold) in folds.iter().enumerate() {
        let config = TrainConfig::new(c, kernel)
            .with_tol(controls.tol)
            .with_max_passes(controls.max_passes)
            .with_seed(derive_seed(controls.seed, 0xce11 + f as u64));
        let model = train_rank_svm(&fold.train, &fold.train_pairs, &config)?;
        let g: Vec<f64> = fold
            .holdout
            .iter()
            .map(|x| model.decision_value(x))
            .collect::<Result<_>>()?;
        let range = g.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
            - g.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let loss = if range < CONSTANT_MODEL_RANGE {
            1.0
        } else {
            wpdl(&model, &fold.holdout, &fold.holdout_pairs)?
        };
        fold_losses.push(loss);
    }
    let mean = fold_losses.iter().sum::<f64>() / fold_losses.len() as f64;
    Ok(CvCell {
        c,
        sigma,
        fold_losses,
        mean_loss: Some(mean),
    })
}
