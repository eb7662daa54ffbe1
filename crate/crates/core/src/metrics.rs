//! Evaluation metrics: exact AUC, false-alarm rates, KS uniformity.

use crate::data::Dataset;
use crate::detector::Detector;
use crate::error::{Error, Result};
use std::fmt::Write as _;

/// Evaluation summary, serializable as flat key=value text.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub auc: f64,
    /// (alpha, flagged fraction) per requested level.
    pub false_alarm: Vec<(f64, f64)>,
    /// KS distance of the nominal scores from U[0,1].
    pub ks_statistic: f64,
    /// Mean wall-clock seconds per scored point.
    pub mean_score_time_secs: f64,
}

impl MetricReport {
    /// One `key=value` line per field, stable ordering, for CI diffing.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "auc={}", self.auc);
        for (alpha, rate) in &self.false_alarm {
            let _ = writeln!(out, "false_alarm_at_{alpha}={rate}");
        }
        let _ = writeln!(out, "ks_statistic={}", self.ks_statistic);
        let _ = writeln!(out, "mean_score_time_secs={}", self.mean_score_time_secs);
        out
    }
}

/// Exact Mann-Whitney AUC with half credit for ties.
///
/// Scores follow the detector convention: LOWER score means more anomalous,
/// so the anomaly statistic is the negated score and
/// AUC = P(s_anom < s_nom) + P(s_anom = s_nom) / 2.
pub fn auc(scores_nominal: &[f64], scores_anomalous: &[f64]) -> Result<f64> {
    if scores_nominal.is_empty() || scores_anomalous.is_empty() {
        return Err(Error::param("scores", "both score lists must be nonempty"));
    }
    let mut combined: Vec<(f64, bool)> = scores_anomalous
        .iter()
        .map(|&s| (s, true))
        .chain(scores_nominal.iter().map(|&s| (s, false)))
        .collect();
    combined.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Sweep ascending, grouping ties: every nominal point pairs fully with
    // the anomalous points strictly below it and half with those tied.
    let mut wins = 0.0f64;
    let mut anom_below = 0usize;
    let mut idx = 0;
    while idx < combined.len() {
        let mut hi = idx;
        while hi < combined.len() && combined[hi].0 == combined[idx].0 {
            hi += 1;
        }
        let group = &combined[idx..hi];
        let anom_in_group = group.iter().filter(|(_, a)| *a).count();
        let nom_in_group = group.len() - anom_in_group;
        wins += nom_in_group as f64 * (anom_below as f64 + 0.5 * anom_in_group as f64);
        anom_below += anom_in_group;
        idx = hi;
    }
    Ok(wins / (scores_nominal.len() as f64 * scores_anomalous.len() as f64))
}

/// Fraction of held-out nominal points flagged anomalous at each alpha.
pub fn empirical_false_alarm(
    detector: &Detector,
    nominal_test: &Dataset,
    alphas: &[f64],
) -> Result<Vec<(f64, f64)>> {
    if nominal_test.n() == 0 {
        return Err(Error::EmptyDataset);
    }
    let scores: Vec<f64> = nominal_test
        .iter()
        .map(|x| detector.score(x))
        .collect::<Result<_>>()?;
    alphas
        .iter()
        .map(|&alpha| {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::param("alpha", "must lie in (0, 1)"));
            }
            let flagged = scores.iter().filter(|&&s| s <= alpha).count();
            Ok((alpha, flagged as f64 / scores.len() as f64))
        })
        .collect()
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `scores` and the
/// U[0,1] CDF.
pub fn uniformity_ks(scores: &[f64]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::param("scores", "need at least one score"));
    }
    if let Some(&bad) = scores.iter().find(|&&s| !(0.0..=1.0).contains(&s)) {
        return Err(Error::param("scores", format!("score {bad} outside [0,1]")));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &s) in sorted.iter().enumerate() {
        d = d.max((i as f64 + 1.0) / n - s).max(s - i as f64 / n);
    }
    Ok(d)
}

/// Asymptotic KS critical value at the given significance: c(a) / sqrt(n)
/// with c(a) = sqrt(-ln(a/2) / 2).
pub fn ks_critical_value(n: usize, significance: f64) -> f64 {
    (-(significance / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn auc_full_separation() {
        let v = auc(&[0.9, 0.8], &[0.1, 0.0]).unwrap();
        assert_eq!(v, 1.0);
        let v = auc(&[0.1, 0.0], &[0.9, 0.8]).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn auc_all_ties_is_half() {
        let v = auc(&[0.5, 0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert_eq!(v, 0.5);
    }

    #[test]
    fn auc_rejects_empty() {
        assert!(auc(&[], &[0.5]).is_err());
        assert!(auc(&[0.5], &[]).is_err());
    }

    // Oracle: O(n^2) pairwise comparison with half credit for ties.
    #[test]
    fn auc_matches_pairwise_oracle() {
        let mut rng = crate::seed::rng_for(19, 0);
        for _ in 0..20 {
            let nom: Vec<f64> = (0..50).map(|_| (rng.gen_range(0..20) as f64) / 20.0).collect();
            let anom: Vec<f64> = (0..50).map(|_| (rng.gen_range(0..20) as f64) / 20.0).collect();
            let mut wins = 0.0;
            for &a in &anom {
                for &n in &nom {
                    if a < n {
                        wins += 1.0;
                    } else if a == n {
                        wins += 0.5;
                    }
                }
            }
            let expected = wins / (nom.len() * anom.len()) as f64;
            let got = auc(&nom, &anom).unwrap();
            assert!((got - expected).abs() < 1e-12);
        }
    }

    // Antisymmetry on tie-free inputs: auc(a, b) + auc(b, a) = 1.
    #[test]
    fn auc_antisymmetry() {
        let mut rng = crate::seed::rng_for(29, 0);
        let a: Vec<f64> = (0..40).map(|_| rng.gen::<f64>()).collect();
        let b: Vec<f64> = (0..30).map(|_| rng.gen::<f64>()).collect();
        let fwd = auc(&a, &b).unwrap();
        let rev = auc(&b, &a).unwrap();
        assert!((fwd + rev - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ks_on_near_perfect_grid() {
        let n = 99;
        let scores: Vec<f64> = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
        let d = uniformity_ks(&scores).unwrap();
        assert!((d - 1.0 / (n + 1) as f64).abs() < 1e-12);
    }

    #[test]
    fn ks_point_mass_is_half() {
        let d = uniformity_ks(&[0.5; 10]).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ks_uniform_draws_are_small() {
        let mut rng = crate::seed::rng_for(31, 0);
        let scores: Vec<f64> = (0..10_000).map(|_| rng.gen::<f64>()).collect();
        let d = uniformity_ks(&scores).unwrap();
        assert!(d < 0.02, "KS of uniform draws was {d}");
    }

    #[test]
    fn ks_rejects_out_of_range() {
        assert!(uniformity_ks(&[0.5, 1.2]).is_err());
        assert!(uniformity_ks(&[]).is_err());
    }

    #[test]
    fn report_text_is_flat_key_value() {
        let report = MetricReport {
            auc: 0.925,
            false_alarm: vec![(0.05, 0.048), (0.1, 0.101)],
            ks_statistic: 0.012,
            mean_score_time_secs: 1.5e-6,
        };
        let text = report.to_text();
        assert!(text.contains("auc=0.925"));
        assert!(text.contains("false_alarm_at_0.05=0.048"));
        assert!(text.contains("false_alarm_at_0.1=0.101"));
        assert!(text.contains("ks_statistic=0.012"));
        for line in text.lines() {
            assert_eq!(line.matches('=').count(), 1);
        }
    }
}
