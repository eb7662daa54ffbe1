use rankad::data::Dataset;
use rankad::knn::{k_for_sample_size, knn_statistic, score_pk, NeighborConfig};
use rankad::seed::rng_for;
use rankad::synth::{sample_mixture, true_pvalues, GaussianComponent, GaussianMixtureSpec};
use rand::seq::SliceRandom;

// Two-directional split score: per round, eta is scored against each half's
// reference (the opposite half) and compared to that half's table.
fn resampled_score(eta: &[f64], s: &Dataset, k: usize, rounds: usize, seed: u64) -> f64 {
    let n = s.n();
    let cfg = NeighborConfig::kth_distance(k);
    let mut indices: Vec<usize> = (0..n).collect();
    let mut total = 0.0;
    for round in 0..rounds {
        let mut rng = rng_for(seed, round as u64);
        indices.shuffle(&mut rng);
        let half = n.div_ceil(2);
        let (s1_idx, s2_idx) = indices.split_at(half);
        for (own, other) in [(s1_idx, s2_idx), (s2_idx, s1_idx)] {
            let reference = s.subset(other).unwrap();
            let r_eta = knn_statistic(eta, &reference, &cfg).unwrap();
            let count = own
                .iter()
                .filter(|&&i| r_eta <= knn_statistic(s.point(i), &reference, &cfg).unwrap())
                .count();
            total += count as f64 / own.len() as f64;
        }
    }
    total / (2 * rounds) as f64
}

fn main() {
    let spec = GaussianMixtureSpec::new(
        vec![GaussianComponent { weight: 1.0, mean: vec![0.0, 0.0], covariance: vec![1.0, 0.0, 0.0, 1.0] }],
        2,
    )
    .unwrap();
    let etas_data = sample_mixture(&spec, 200, 777).unwrap();
    let etas: Vec<&[f64]> = (0..etas_data.n()).map(|i| etas_data.point(i)).collect();
    let oracle = true_pvalues(&spec, &etas, 1_000_000, 778).unwrap();

    for &train_seed in &[800u64, 900, 1000] {
        let mut line = format!("train_seed {train_seed}:");
        for &n in &[200usize, 800, 3200] {
            let k = k_for_sample_size(n);
            let train = sample_mixture(&spec, n, train_seed).unwrap();
            let cfg = NeighborConfig::kth_distance(k);
            let mut e_plain = 0.0;
            let mut e_split = 0.0;
            for (eta, &p) in etas.iter().zip(&oracle) {
                e_plain += (score_pk(eta, &train, &cfg).unwrap() - p).abs();
                e_split += (resampled_score(eta, &train, k, 20, 9) - p).abs();
            }
            let m = etas.len() as f64;
            line.push_str(&format!("  n={n}: plain={:.4} split2={:.4}", e_plain / m, e_split / m));
        }
        println!("{line}");
    }
}
