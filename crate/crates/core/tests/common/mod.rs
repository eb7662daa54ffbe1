//! Shared helpers for the acceptance suite: the PASS/FAIL reporter, a dense
//! projected-gradient QP oracle for the solver, and synthetic detectors for
//! the scoring-cost checks.

use rankad::data::Dataset;
use rankad::detector::Detector;
use rankad::kernel::{rbf_kernel, KernelConfig};
use rankad::ranker::{RankModel, SupportPair};
use rankad::seed::rng_for;
use rand::Rng;

pub fn report(criterion: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("[criterion {criterion}] {verdict}: {detail}");
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// Dense pair-kernel matrix Q(p, q) over the given preference pairs.
pub fn pair_kernel_matrix(s: &Dataset, pairs: &[(usize, usize)], sigma: f64) -> Vec<f64> {
    let k = |a: usize, b: usize| rbf_kernel(s.point(a), s.point(b), sigma).unwrap();
    let p = pairs.len();
    let mut q = vec![0.0f64; p * p];
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for (b, &(l, m)) in pairs.iter().enumerate() {
            q[a * p + b] = k(i, l) - k(i, m) - k(j, l) + k(j, m);
        }
    }
    q
}

/// Dual objective sum(alpha) - 1/2 alpha' Q alpha.
pub fn dual_objective(q: &[f64], alphas: &[f64]) -> f64 {
    let p = alphas.len();
    let mut quad = 0.0;
    for a in 0..p {
        for b in 0..p {
            quad += alphas[a] * alphas[b] * q[a * p + b];
        }
    }
    alphas.iter().sum::<f64>() - 0.5 * quad
}

/// Projected gradient ascent on the box-constrained dual, run to stagnation.
/// Independent of the coordinate-ascent implementation under test.
pub fn projected_gradient_qp(q: &[f64], c: f64) -> Vec<f64> {
    let p = (q.len() as f64).sqrt() as usize;
    let lipschitz = (0..p)
        .map(|a| (0..p).map(|b| q[a * p + b].abs()).sum::<f64>())
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let step = 1.0 / lipschitz;

    let mut alphas = vec![0.0f64; p];
    let mut last_objective = f64::NEG_INFINITY;
    let mut stagnant = 0;
    for _ in 0..2_000_000 {
        for a in 0..p {
            let margin: f64 = (0..p).map(|b| alphas[b] * q[a * p + b]).sum();
            let updated = (alphas[a] + step * (1.0 - margin)).clamp(0.0, c);
            alphas[a] = updated;
        }
        let objective = dual_objective(q, &alphas);
        if objective - last_objective < 1e-15 {
            stagnant += 1;
            if stagnant >= 50 {
                break;
            }
        } else {
            stagnant = 0;
        }
        last_objective = objective;
    }
    alphas
}

/// Detector over explicit sorted decision values (model unused for scoring).
pub fn detector_from_values(sorted_g: &[f64]) -> Detector {
    let model = RankModel {
        kernel: KernelConfig::new(1.0).unwrap(),
        c: 1.0,
        dim: 1,
        support_pairs: vec![SupportPair {
            first: vec![0.0],
            second: vec![1.0],
            alpha: 1.0,
        }],
        training_decision_values: vec![],
        converged: true,
        worst_residual: 0.0,
        passes: 1,
        dropped_pairs: 0,
    };
    Detector::from_parts(model, sorted_g.to_vec()).unwrap()
}

/// Detector with a prescribed support-pair count and training-set size, for
/// timing the O(d s + log n) scoring path.
pub fn synthetic_detector(support_pairs: usize, n: usize, seed: u64) -> Detector {
    let mut rng = rng_for(seed, 0);
    let pairs: Vec<SupportPair> = (0..support_pairs)
        .map(|_| SupportPair {
            first: vec![rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0)],
            second: vec![rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0)],
            alpha: rng.gen_range(0.1..1.0),
        })
        .collect();
    let model = RankModel {
        kernel: KernelConfig::new(2.0).unwrap(),
        c: 1.0,
        dim: 2,
        support_pairs: pairs,
        training_decision_values: vec![],
        converged: true,
        worst_residual: 0.0,
        passes: 1,
        dropped_pairs: 0,
    };
    let mut g: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    g.sort_by(f64::total_cmp);
    Detector::from_parts(model, g).unwrap()
}
