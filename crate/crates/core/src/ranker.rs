//! Max-margin learning-to-rank on quantized K-NN scores.
//!
//! Training quantizes the estimated p-values into m levels, emits a
//! preference pair (i, j) whenever level(x_i) < level(x_j) — the sparser,
//! more anomalous point must score HIGHER — and solves
//!
//!   min_g 1/2 ||g||^2 + C * sum ξ_ij
//!   s.t.  <g, Φ(x_i) - Φ(x_j)> >= 1 - ξ_ij,  ξ_ij >= 0
//!
//! in the RKHS of an RBF kernel. The dual is a box-constrained QP with one
//! multiplier per pair and pair-kernel
//!
//!   Q(p, q) = k(x_i, x_k) - k(x_i, x_l) - k(x_j, x_k) + k(x_j, x_l)
//!
//! solved by coordinate ascent: alpha_p <- clip(alpha_p + (1 - margin_p) /
//! Q(p, p), 0, C). The resulting scorer g increases with the K-NN distance
//! statistic, so large g means anomalous.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::kernel::{rbf_unchecked, Gram, KernelConfig};
use crate::knn::NominalScoreTable;
use crate::seed::rng_for;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Dual coefficients below this are treated as zero when pruning support pairs.
const PRUNE_THRESHOLD: f64 = 1e-12;

/// Per-point quantization levels in {1, ..., m}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedRanks {
    pub levels: Vec<u32>,
    pub m: u32,
}

/// Ordered index pairs (i, j) demanding g(x_i) > g(x_j), uniformly weighted.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferencePairSet {
    pub pairs: Vec<(usize, usize)>,
    /// Uniform pair weight 1/|P|.
    pub weight: f64,
}

/// One retained dual coefficient with its pair's endpoint coordinates.
///
/// Coordinates are stored (rather than training-set indices) so a saved model
/// can score without the original dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportPair {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    pub alpha: f64,
}

/// Trained kernel ranker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankModel {
    pub kernel: KernelConfig,
    pub c: f64,
    pub dim: usize,
    pub support_pairs: Vec<SupportPair>,
    /// Decision values of the training points, sorted ascending.
    pub training_decision_values: Vec<f64>,
    pub converged: bool,
    pub worst_residual: f64,
    pub passes: usize,
    pub dropped_pairs: usize,
}

/// Solver parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub c: f64,
    pub kernel: KernelConfig,
    pub tol: f64,
    pub max_passes: usize,
    pub seed: u64,
}

impl TrainConfig {
    pub fn new(c: f64, kernel: KernelConfig) -> Self {
        TrainConfig {
            c,
            kernel,
            tol: 1e-4,
            max_passes: 1000,
            seed: 0,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_passes(mut self, max_passes: usize) -> Self {
        self.max_passes = max_passes;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Solver state exposed for verification.
#[derive(Debug, Clone)]
pub struct TrainDiagnostics {
    /// Final dual coefficient per retained input pair (dropped pairs hold 0).
    pub alphas: Vec<f64>,
    /// Final margin g(x_i) - g(x_j) per input pair.
    pub margins: Vec<f64>,
    pub dual_objective: f64,
    pub primal_objective: f64,
    /// False where the pair was dropped for a vanishing self-kernel.
    pub kept: Vec<bool>,
}

/// Quantize p-values uniformly into m levels over [0,1].
///
/// level(x) = min(m, 1 + floor(p * m)); level 1 holds the smallest p-values
/// (most anomalous), level m the largest, with the upper bin closed.
pub fn quantize(table: &NominalScoreTable, m: u32) -> Result<QuantizedRanks> {
    if m < 2 {
        return Err(Error::param("m", "need at least 2 quantization levels"));
    }
    let mut levels = Vec::with_capacity(table.p_hat.len());
    for (i, &p) in table.p_hat.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param(
                "p_hat",
                format!("value {p} at index {i} is outside [0,1]"),
            ));
        }
        levels.push(((p * m as f64).floor() as u32 + 1).min(m));
    }
    Ok(QuantizedRanks { levels, m })
}

/// Emit preference pairs between every two points of different levels.
///
/// The lower-level (more anomalous) point comes first. When `cap` is given
/// and the full set is larger, a seeded stratified subsample of exactly `cap`
/// pairs is drawn, allocating quota to each level-boundary stratum in
/// proportion to its size.
pub fn generate_pairs(
    ranks: &QuantizedRanks,
    cap: Option<usize>,
    seed: u64,
) -> Result<PreferencePairSet> {
    if let Some(0) = cap {
        return Err(Error::param("cap", "must be at least 1"));
    }
    let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); ranks.m as usize + 1];
    for (i, &lvl) in ranks.levels.iter().enumerate() {
        by_level[lvl as usize].push(i);
    }
    let occupied: Vec<usize> = (1..=ranks.m as usize)
        .filter(|&l| !by_level[l].is_empty())
        .collect();
    if occupied.len() < 2 {
        return Err(Error::DegenerateRanking);
    }

    // Strata are ordered level boundaries (a, b) with a < b; pairs are
    // (low-level point, high-level point).
    let strata: Vec<(usize, usize)> = occupied
        .iter()
        .enumerate()
        .flat_map(|(idx, &a)| occupied[idx + 1..].iter().map(move |&b| (a, b)))
        .collect();
    let sizes: Vec<usize> = strata
        .iter()
        .map(|&(a, b)| by_level[a].len() * by_level[b].len())
        .collect();
    let total: usize = sizes.iter().sum();

    let mut pairs = Vec::new();
    match cap {
        Some(cap) if cap < total => {
            let quotas = proportional_quota(&sizes, cap);
            let mut rng = rng_for(seed, 0);
            for ((&(a, b), &n_ab), &q) in strata.iter().zip(&sizes).zip(&quotas) {
                if q == 0 {
                    continue;
                }
                let lows = &by_level[a];
                let highs = &by_level[b];
                for flat in sample_distinct(&mut rng, n_ab, q) {
                    pairs.push((lows[flat / highs.len()], highs[flat % highs.len()]));
                }
            }
        }
        _ => {
            for &(a, b) in &strata {
                for &i in &by_level[a] {
                    for &j in &by_level[b] {
                        pairs.push((i, j));
                    }
                }
            }
        }
    }

    let weight = 1.0 / pairs.len() as f64;
    Ok(PreferencePairSet { pairs, weight })
}

/// Largest-remainder apportionment of `cap` among strata of the given sizes,
/// never exceeding a stratum's size.
fn proportional_quota(sizes: &[usize], cap: usize) -> Vec<usize> {
    let total: usize = sizes.iter().sum();
    let mut quotas: Vec<usize> = Vec::with_capacity(sizes.len());
    let mut remainders: Vec<(f64, usize)> = Vec::with_capacity(sizes.len());
    let mut assigned = 0usize;
    for (idx, &sz) in sizes.iter().enumerate() {
        let exact = cap as f64 * sz as f64 / total as f64;
        let q = (exact.floor() as usize).min(sz);
        quotas.push(q);
        assigned += q;
        remainders.push((exact - q as f64, idx));
    }
    remainders.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut left = cap.saturating_sub(assigned);
    let mut cursor = 0;
    while left > 0 {
        let (_, idx) = remainders[cursor % remainders.len()];
        if quotas[idx] < sizes[idx] {
            quotas[idx] += 1;
            left -= 1;
        }
        cursor += 1;
    }
    quotas
}

/// Floyd's algorithm: q distinct values from [0, n), ascending.
fn sample_distinct(rng: &mut impl Rng, n: usize, q: usize) -> Vec<usize> {
    let mut chosen = BTreeSet::new();
    for t in (n - q)..n {
        let r = rng.gen_range(0..=t);
        if !chosen.insert(r) {
            chosen.insert(t);
        }
    }
    chosen.into_iter().collect()
}

/// Train the kernel rank-SVM by dual coordinate ascent.
///
/// Non-convergence within `max_passes` is not an error: the model comes back
/// with `converged = false` and the worst KKT residual. Pairs whose
/// self-kernel Q(p,p) vanishes (identical endpoints) are dropped and counted.
pub fn train_rank_svm(
    s: &Dataset,
    pairs: &PreferencePairSet,
    config: &TrainConfig,
) -> Result<RankModel> {
    train_rank_svm_detailed(s, pairs, config).map(|(model, _)| model)
}

/// As [`train_rank_svm`], also returning per-pair solver state.
pub fn train_rank_svm_detailed(
    s: &Dataset,
    pairs: &PreferencePairSet,
    config: &TrainConfig,
) -> Result<(RankModel, TrainDiagnostics)> {
    if pairs.pairs.is_empty() {
        return Err(Error::param("pairs", "preference pair set is empty"));
    }
    if !(config.c > 0.0) {
        return Err(Error::param("C", "must be positive"));
    }
    if !(config.tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    let n = s.n();
    for &(i, j) in &pairs.pairs {
        if i >= n || j >= n {
            return Err(Error::param("pairs", format!("index ({i},{j}) out of range")));
        }
    }

    let gram = Gram::new(s, config.kernel);
    let c = config.c;

    // Q(p,p) = 2 (1 - k(x_i, x_j)); zero means the endpoints coincide.
    let q_self: Vec<f64> = pairs
        .pairs
        .iter()
        .map(|&(i, j)| 2.0 * (1.0 - gram.value(i, j)))
        .collect();
    let kept: Vec<bool> = q_self.iter().map(|&q| q > 0.0).collect();
    let active: Vec<usize> = (0..pairs.pairs.len()).filter(|&p| kept[p]).collect();
    let dropped_pairs = pairs.pairs.len() - active.len();
    if active.is_empty() {
        return Err(Error::InvalidInput(
            "every preference pair joins identical points".to_string(),
        ));
    }

    let mut alphas = vec![0.0f64; pairs.pairs.len()];
    let mut g = vec![0.0f64; n];
    let mut order = active.clone();
    let mut rng = rng_for(config.seed, 0x7261_6e6b);

    let mut converged = false;
    let mut worst = f64::INFINITY;
    let mut passes = 0;
    for _ in 0..config.max_passes {
        passes += 1;
        order.shuffle(&mut rng);
        for &p in &order {
            let (i, j) = pairs.pairs[p];
            let margin = g[i] - g[j];
            let updated = (alphas[p] + (1.0 - margin) / q_self[p]).clamp(0.0, c);
            let delta = updated - alphas[p];
            if delta != 0.0 {
                alphas[p] = updated;
                gram.accumulate_row_diff(i, j, delta, &mut g);
            }
        }
        worst = worst_kkt_residual(&pairs.pairs, &active, &alphas, &g, c);
        if worst <= config.tol {
            converged = true;
            break;
        }
    }

    // Support pairs and decision values are rebuilt from the final alphas so
    // that stored values match the decision_value path exactly (the g vector
    // maintained incrementally carries accumulated rounding).
    let support_pairs: Vec<SupportPair> = active
        .iter()
        .filter(|&&p| alphas[p] > PRUNE_THRESHOLD)
        .map(|&p| {
            let (i, j) = pairs.pairs[p];
            SupportPair {
                first: s.point(i).to_vec(),
                second: s.point(j).to_vec(),
                alpha: alphas[p],
            }
        })
        .collect();
    if support_pairs.is_empty() {
        return Err(Error::InvalidInput(
            "training produced no support pairs (all multipliers vanished)".to_string(),
        ));
    }

    let model_stub = RankModel {
        kernel: config.kernel,
        c,
        dim: s.dim(),
        support_pairs,
        training_decision_values: Vec::new(),
        converged,
        worst_residual: worst,
        passes,
        dropped_pairs,
    };
    let mut decision_values: Vec<f64> = s
        .iter()
        .map(|x| model_stub.decision_value(x))
        .collect::<Result<_>>()?;
    // Recompute exact margins for diagnostics from the same path.
    let margins: Vec<f64> = pairs
        .pairs
        .iter()
        .map(|&(i, j)| decision_values[i] - decision_values[j])
        .collect();
    decision_values.sort_by(f64::total_cmp);

    let model = RankModel {
        training_decision_values: decision_values,
        ..model_stub
    };

    let dual_objective = alphas.iter().sum::<f64>()
        - 0.5
            * alphas
                .iter()
                .zip(&margins)
                .map(|(a, m)| a * m)
                .sum::<f64>();
    let norm_sq: f64 = alphas.iter().zip(&margins).map(|(a, m)| a * m).sum();
    let hinge: f64 = margins
        .iter()
        .zip(&kept)
        .filter(|(_, &keep)| keep)
        .map(|(m, _)| (1.0 - m).max(0.0))
        .sum();
    let primal_objective = 0.5 * norm_sq + c * hinge;

    Ok((
        model,
        TrainDiagnostics {
            alphas,
            margins,
            dual_objective,
            primal_objective,
            kept,
        },
    ))
}

fn worst_kkt_residual(
    pairs: &[(usize, usize)],
    active: &[usize],
    alphas: &[f64],
    g: &[f64],
    c: f64,
) -> f64 {
    let mut worst = 0.0f64;
    for &p in active {
        let (i, j) = pairs[p];
        let margin = g[i] - g[j];
        let a = alphas[p];
        let r = if a <= 0.0 {
            (1.0 - margin).max(0.0)
        } else if a >= c {
            (margin - 1.0).max(0.0)
        } else {
            (margin - 1.0).abs()
        };
        worst = worst.max(r);
    }
    worst
}

impl RankModel {
    /// g(x) = sum over support pairs of alpha * (k(x_i, x) - k(x_j, x)).
    ///
    /// Costs O(d * s) for s support pairs.
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        if self.support_pairs.is_empty() {
            return Err(Error::UntrainedModel);
        }
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let inv = 1.0 / (self.kernel.sigma * self.kernel.sigma);
        Ok(self
            .support_pairs
            .iter()
            .map(|sp| {
                sp.alpha * (rbf_unchecked(&sp.first, x, inv) - rbf_unchecked(&sp.second, x, inv))
            })
            .sum())
    }

    /// Number of support pairs (the s in the O(d s + log n) test cost).
    pub fn support_pair_count(&self) -> usize {
        self.support_pairs.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knn::NominalScoreTable;

    fn table(p: &[f64]) -> NominalScoreTable {
        NominalScoreTable {
            r_values: vec![0.0; p.len()],
            p_hat: p.to_vec(),
            rounds: 1,
        }
    }

    #[test]
    fn quantize_uniform_bins() {
        let q = quantize(&table(&[0.1, 0.5, 0.9]), 3).unwrap();
        assert_eq!(q.levels, vec![1, 2, 3]);
    }

    #[test]
    fn quantize_upper_bin_is_closed() {
        let q = quantize(&table(&[1.0]), 3).unwrap();
        assert_eq!(q.levels, vec![3]);
    }

    #[test]
    fn quantize_rejects_small_m() {
        assert!(quantize(&table(&[0.5]), 1).is_err());
    }

    #[test]
    fn quantize_uniform_draws_balance() {
        use rand::Rng;
        let mut rng = rng_for(3, 0);
        let p: Vec<f64> = (0..1000).map(|_| rng.gen::<f64>()).collect();
        let q = quantize(&table(&p), 3).unwrap();
        for lvl in 1..=3u32 {
            let share =
                q.levels.iter().filter(|&&l| l == lvl).count() as f64 / q.levels.len() as f64;
            assert!((0.28..=0.39).contains(&share), "level {lvl} share {share}");
        }
    }

    #[test]
    fn pairs_orient_low_level_first() {
        let ranks = QuantizedRanks {
            levels: vec![1, 2, 3],
            m: 3,
        };
        let p = generate_pairs(&ranks, None, 0).unwrap();
        let mut got = p.pairs.clone();
        got.sort_unstable();
        assert_eq!(got, vec![(0, 1), (0, 2), (1, 2)]);
        assert!((p.weight - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn single_level_is_degenerate() {
        let ranks = QuantizedRanks {
            levels: vec![2, 2, 2],
            m: 3,
        };
        assert!(matches!(
            generate_pairs(&ranks, None, 0),
            Err(Error::DegenerateRanking)
        ));
    }

    #[test]
    fn cap_yields_exactly_cap_pairs_deterministically() {
        let levels: Vec<u32> = (0..300).map(|i| (i % 3 + 1) as u32).collect();
        let ranks = QuantizedRanks { levels, m: 3 };
        let a = generate_pairs(&ranks, Some(1000), 9).unwrap();
        assert_eq!(a.pairs.len(), 1000);
        let b = generate_pairs(&ranks, Some(1000), 9).unwrap();
        assert_eq!(a, b);
        // No duplicates, orientation respected.
        let mut seen = std::collections::HashSet::new();
        for &(i, j) in &a.pairs {
            assert!(ranks.levels[i] < ranks.levels[j]);
            assert!(seen.insert((i, j)));
        }
    }

    #[test]
    fn cap_preserves_stratum_proportions() {
        // Levels 1 and 2 each hold 30 points, level 3 holds 3: stratum sizes
        // 900 / 90 / 90 should keep roughly a 10:1:1 quota split.
        let mut levels = vec![1u32; 30];
        levels.extend(vec![2u32; 30]);
        levels.extend(vec![3u32; 3]);
        let ranks = QuantizedRanks { levels, m: 3 };
        let p = generate_pairs(&ranks, Some(360), 4).unwrap();
        assert_eq!(p.pairs.len(), 360);
        let cross_12 = p
            .pairs
            .iter()
            .filter(|&&(i, j)| ranks.levels[i] == 1 && ranks.levels[j] == 2)
            .count();
        assert!((280..=320).contains(&cross_12), "1-2 stratum got {cross_12}");
    }

    fn two_point_set() -> Dataset {
        Dataset::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap()
    }

    fn single_pair() -> PreferencePairSet {
        PreferencePairSet {
            pairs: vec![(0, 1)],
            weight: 1.0,
        }
    }

    // One-variable dual has the closed form alpha* = clip(1/Q, 0, C) with
    // Q = 2 (1 - exp(-1)).
    #[test]
    fn single_pair_closed_form() {
        let s = two_point_set();
        let config = TrainConfig::new(10.0, KernelConfig::new(1.0).unwrap()).with_tol(1e-10);
        let model = train_rank_svm(&s, &single_pair(), &config).unwrap();
        assert!(model.converged);
        assert_eq!(model.support_pairs.len(), 1);

        let q = 2.0 * (1.0 - (-1.0f64).exp());
        assert!((q - 1.264241).abs() < 1e-6);
        let expected_alpha = 1.0 / q;
        assert!((expected_alpha - 0.790989).abs() < 1e-6);
        assert!((model.support_pairs[0].alpha - expected_alpha).abs() < 1e-10);

        let margin = model.decision_value(&[0.0, 0.0]).unwrap()
            - model.decision_value(&[1.0, 0.0]).unwrap();
        assert!((margin - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_pair_clips_at_small_c() {
        let s = two_point_set();
        let config = TrainConfig::new(0.1, KernelConfig::new(1.0).unwrap());
        let model = train_rank_svm(&s, &single_pair(), &config).unwrap();
        assert!(model.converged);
        assert!((model.support_pairs[0].alpha - 0.1).abs() < 1e-15);
        let margin = model.decision_value(&[0.0, 0.0]).unwrap()
            - model.decision_value(&[1.0, 0.0]).unwrap();
        assert!(margin < 1.0);
    }

    #[test]
    fn identical_endpoints_are_dropped() {
        let s = Dataset::from_rows(&[vec![0.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let pairs = PreferencePairSet {
            pairs: vec![(0, 1), (0, 2)],
            weight: 0.5,
        };
        let config = TrainConfig::new(1.0, KernelConfig::new(1.0).unwrap());
        let model = train_rank_svm(&s, &pairs, &config).unwrap();
        assert_eq!(model.dropped_pairs, 1);
        assert_eq!(model.support_pairs.len(), 1);
    }

    fn random_instance(seed: u64) -> (Dataset, PreferencePairSet, TrainConfig) {
        use rand::Rng;
        let mut rng = rng_for(seed, 1);
        let n = rng.gen_range(4..=8);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)])
            .collect();
        let s = Dataset::from_rows(&rows).unwrap();
        let n_pairs = rng.gen_range(3..=12);
        let mut pairs = Vec::new();
        while pairs.len() < n_pairs {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i != j && !pairs.contains(&(i, j)) {
                pairs.push((i, j));
            }
        }
        let weight = 1.0 / pairs.len() as f64;
        let c = [0.5, 2.0, 10.0][rng.gen_range(0..3)];
        let sigma = rng.gen_range(0.5..3.0);
        let config = TrainConfig::new(c, KernelConfig::new(sigma).unwrap())
            .with_tol(1e-8)
            .with_max_passes(100_000)
            .with_seed(seed);
        (s, PreferencePairSet { pairs, weight }, config)
    }

    #[test]
    fn kkt_conditions_hold_at_convergence() {
        for seed in 0..5 {
            let (s, pairs, config) = random_instance(seed);
            let (model, diag) = train_rank_svm_detailed(&s, &pairs, &config).unwrap();
            assert!(model.converged);
            let tol = 1e-6;
            for (p, &keep) in diag.kept.iter().enumerate() {
                if !keep {
                    continue;
                }
                let a = diag.alphas[p];
                let margin = diag.margins[p];
                assert!((-1e-12..=config.c + 1e-12).contains(&a));
                if a <= 0.0 {
                    assert!(margin >= 1.0 - tol, "seed {seed}: zero alpha margin {margin}");
                } else if a >= config.c {
                    assert!(margin <= 1.0 + tol, "seed {seed}: boxed alpha margin {margin}");
                } else {
                    assert!(
                        (margin - 1.0).abs() <= tol,
                        "seed {seed}: interior alpha margin {margin}"
                    );
                }
            }
            // Weak duality plus a near-zero gap at convergence.
            assert!(diag.dual_objective <= diag.primal_objective + 1e-9);
            assert!(
                diag.primal_objective - diag.dual_objective
                    <= 1e-6 * pairs.pairs.len() as f64 + 1e-9
            );
        }
    }

    #[test]
    fn training_is_deterministic_under_seed() {
        let (s, pairs, config) = random_instance(99);
        let a = train_rank_svm(&s, &pairs, &config).unwrap();
        let b = train_rank_svm(&s, &pairs, &config).unwrap();
        assert_eq!(a, b);
    }

    // A separable 1-D instance with strictly ordered levels: the trained
    // scorer must reproduce the level ordering exactly.
    #[test]
    fn order_fidelity_on_separable_line() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let s = Dataset::from_rows(&rows).unwrap();
        // Point 0 is most anomalous (level 1) through point 9 (level 10).
        let t = table(&(0..10).map(|i| (i as f64 + 0.5) / 10.0).collect::<Vec<_>>());
        let ranks = quantize(&t, 10).unwrap();
        assert_eq!(ranks.levels, (1..=10).collect::<Vec<u32>>());
        let pairs = generate_pairs(&ranks, None, 0).unwrap();
        assert_eq!(pairs.pairs.len(), 45);
        let config = TrainConfig::new(1000.0, KernelConfig::new(2.0).unwrap())
            .with_tol(1e-6)
            .with_max_passes(20_000);
        let model = train_rank_svm(&s, &pairs, &config).unwrap();
        let g: Vec<f64> = rows
            .iter()
            .map(|r| model.decision_value(r).unwrap())
            .collect();
        for w in g.windows(2) {
            assert!(w[0] > w[1], "ordering broken: {g:?}");
        }
    }

    #[test]
    fn decision_value_is_zero_by_symmetry_and_decays() {
        let s = two_point_set();
        let config = TrainConfig::new(10.0, KernelConfig::new(1.0).unwrap());
        let model = train_rank_svm(&s, &single_pair(), &config).unwrap();
        // Equidistant from both endpoints of the only support pair.
        let mid = model.decision_value(&[0.5, 7.3]).unwrap();
        assert!(mid.abs() < 1e-15);
        let far = model.decision_value(&[1e4, 0.0]).unwrap();
        assert!(far.abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        let s = two_point_set();
        let config = TrainConfig::new(1.0, KernelConfig::new(1.0).unwrap());
        let empty = PreferencePairSet {
            pairs: vec![],
            weight: 0.0,
        };
        assert!(train_rank_svm(&s, &empty, &config).is_err());
        let bad_c = TrainConfig::new(0.0, KernelConfig::new(1.0).unwrap());
        assert!(train_rank_svm(&s, &single_pair(), &bad_c).is_err());
        let model = train_rank_svm(&s, &single_pair(), &config).unwrap();
        assert!(model.decision_value(&[0.0]).is_err());
    }
}
