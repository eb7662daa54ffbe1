use rankad::detector::fit_detector;
use rankad::kernel::KernelConfig;
use rankad::knn::{resampled_nominal_scores, NeighborConfig};
use rankad::metrics::{ks_critical_value, uniformity_ks};
use rankad::model_selection::default_sigma_grid;
use rankad::ranker::{generate_pairs, quantize, train_rank_svm, TrainConfig};
use rankad::synth::{sample_mixture, GaussianMixtureSpec};

fn main() {
    let f0 = GaussianMixtureSpec::toy_sec72();
    println!("critical = {:.4}", ks_critical_value(10_000, 0.01));
    for seed in [61u64, 161, 261] {
        let train = sample_mixture(&f0, 2000, seed).unwrap();
        let heldout = sample_mixture(&f0, 10_000, seed + 2).unwrap();
        let d_ref = default_sigma_grid(&train, 20).unwrap()[10];
        let table = resampled_nominal_scores(&train, &NeighborConfig::mean_first_k(20), 20, seed + 3).unwrap();
        let ranks = quantize(&table, 3).unwrap();
        let pairs = generate_pairs(&ranks, Some(20_000), seed + 4).unwrap();
        let config = TrainConfig::new(100.0, KernelConfig::new(8.0 * d_ref).unwrap())
            .with_tol(1e-4).with_max_passes(800).with_seed(seed + 5);
        let model = train_rank_svm(&train, &pairs, &config).unwrap();
        let mut line = format!("seed {seed} (D={d_ref:.3}):");
        for cal_n in [2000usize, 8000, 16000] {
            let calibration = sample_mixture(&f0, cal_n, seed + 1).unwrap();
            let det = fit_detector(&model, &calibration).unwrap();
            let scores: Vec<f64> = heldout.iter().map(|x| det.score(x).unwrap()).collect();
            let ks = uniformity_ks(&scores).unwrap();
            let fa: Vec<f64> = [0.05, 0.1, 0.2]
                .iter()
                .map(|&a| scores.iter().filter(|&&s| s <= a).count() as f64 / scores.len() as f64)
                .collect();
            let gamma = 0.01 * (det.sorted_g()[det.n() - 1] - det.sorted_g()[0]);
            let thr = det.threshold_for_alpha(0.05, gamma).unwrap();
            let region = heldout.iter().filter(|x| det.g(x).unwrap() >= thr).count() as f64 / 10_000.0;
            line.push_str(&format!(
                " | cal{cal_n}: KS={ks:.4} fa={:.3}/{:.3}/{:.3} reg={region:.3}",
                fa[0], fa[1], fa[2]
            ));
        }
        println!("{line}");
    }
}
