//! Implementations of the six subcommands. Every stage failure is wrapped
//! with the stage name so errors read `stage <name>: <cause>`.

use std::fmt::Write as _;
use std::time::Instant;

use anyhow::{bail, Context, Result};

use rankad::data::{load_csv, write_csv, Dataset, Label};
use rankad::detector::{fit_detector, Verdict};
use rankad::kernel::KernelConfig;
use rankad::knn::{resampled_nominal_scores, NeighborConfig, StatisticMode};
use rankad::metrics::{auc, uniformity_ks, MetricReport};
use rankad::model_selection::{cross_validate, default_sigma_grid, CvControls, CvGrid};
use rankad::persistence::{export_grid, load_model, save_model, TrainingMetadata};
use rankad::ranker::{generate_pairs, quantize, train_rank_svm, TrainConfig};
use rankad::seed::derive_seed;
use rankad::synth::{sample_mixture, sample_uniform_box, BoxSpec, GaussianMixtureSpec};

use crate::config::{defaults, parse_bounds, pick, pick_opt, FileConfig};
use crate::{CvArgs, EvalArgs, GridArgs, ScoreArgs, SynthArgs, TrainArgs};

fn stage<T, E>(name: &str, r: std::result::Result<T, E>) -> Result<T>
where
    E: std::error::Error + Send + Sync + 'static,
{
    r.with_context(|| format!("stage {name}"))
}

fn neighbor_config(mode: &str, k: usize, eps: Option<f64>) -> Result<NeighborConfig> {
    let mode = match mode {
        "mean-k" => StatisticMode::MeanFirstK,
        "kth" => StatisticMode::KthDistance,
        "eps" => StatisticMode::EpsCount,
        other => bail!("stage config: unknown --stat-mode {other:?} (expected mean-k|kth|eps)"),
    };
    if mode == StatisticMode::EpsCount {
        let eps = eps.context("stage config: --stat-mode eps requires --eps")?;
        Ok(NeighborConfig::eps_count(eps))
    } else {
        Ok(NeighborConfig { k, mode, eps: 0.0 })
    }
}

/// Mean leave-one-out average-k-NN distance, the data-driven bandwidth unit.
fn reference_bandwidth(data: &Dataset, k: usize) -> Result<f64> {
    let grid = stage("default_sigma_grid", default_sigma_grid(data, k))?;
    Ok(grid[10])
}

pub fn cmd_train(args: &TrainArgs, file: &FileConfig) -> Result<()> {
    let k = pick(args.k, file.k, defaults::K);
    let levels = pick(args.levels, file.levels, defaults::LEVELS);
    let rounds = pick(args.rounds, file.rounds, defaults::ROUNDS);
    let seed = pick(args.seed, file.seed, defaults::SEED);
    let cost = pick(args.cost, file.cost, defaults::COST);
    let tol = pick(args.tol, file.tol, defaults::TOL);
    let max_passes = pick(args.max_passes, file.max_passes, defaults::MAX_PASSES);
    let stat_mode = args
        .stat_mode
        .clone()
        .or(file.stat_mode.clone())
        .unwrap_or_else(|| "mean-k".to_string());
    let config = neighbor_config(&stat_mode, k, pick_opt(args.eps, file.eps))?;

    let data = stage("load_csv", load_csv(&args.data, args.has_header, args.label_column))?;
    let cap = pick_opt(args.cap, file.cap).unwrap_or(200 * data.n());

    let table = stage(
        "resampled_nominal_scores",
        resampled_nominal_scores(&data, &config, rounds, seed),
    )?;
    let ranks = stage("quantize", quantize(&table, levels))?;
    let pairs = stage(
        "generate_pairs",
        generate_pairs(&ranks, Some(cap), derive_seed(seed, 1)),
    )?;

    let sigma = match pick_opt(args.sigma, file.sigma) {
        Some(s) => s,
        None => reference_bandwidth(&data, k)?,
    };
    let kernel = stage("kernel_config", KernelConfig::new(sigma))?;
    let train_config = TrainConfig::new(cost, kernel)
        .with_tol(tol)
        .with_max_passes(max_passes)
        .with_seed(derive_seed(seed, 2));
    let model = stage("train_rank_svm", train_rank_svm(&data, &pairs, &train_config))?;
    let detector = stage("fit_detector", fit_detector(&model, &data))?;

    let metadata = TrainingMetadata {
        k,
        m: levels,
        c: cost,
        n: data.n(),
        rounds,
        seed,
    };
    stage("save_model", save_model(&detector, &metadata, &args.out))?;

    println!("n={}", data.n());
    println!("pairs={}", pairs.pairs.len());
    println!("support_pairs={}", model.support_pair_count());
    println!("sigma={sigma}");
    println!(
        "converged={} worst_residual={} passes={}",
        model.converged, model.worst_residual, model.passes
    );
    if model.dropped_pairs > 0 {
        eprintln!(
            "warning: dropped {} pair(s) joining identical points",
            model.dropped_pairs
        );
    }
    if !model.converged {
        eprintln!(
            "warning: solver stopped at max_passes={max_passes} with residual {}",
            model.worst_residual
        );
    }
    Ok(())
}

pub fn cmd_score(args: &ScoreArgs, file: &FileConfig) -> Result<()> {
    let alpha = pick(args.alpha, file.alpha, defaults::ALPHA);
    if !(alpha > 0.0 && alpha < 1.0) {
        bail!("stage config: --alpha must lie in the open interval (0, 1)");
    }
    let (detector, _) = stage("load_model", load_model(&args.model))?;

    let data = match load_csv(&args.data, args.has_header, args.label_column) {
        Ok(d) => d,
        // An empty test file is vacuously scored: header only, success.
        Err(rankad::Error::EmptyDataset) => {
            std::fs::write(&args.out, "g,score,verdict\n")
                .with_context(|| format!("stage write_scores: {}", args.out.display()))?;
            return Ok(());
        }
        Err(e) => return stage("load_csv", Err(e)),
    };

    let mut out = String::from("g,score,verdict\n");
    for i in 0..data.n() {
        let r = stage("score", detector.classify(data.point(i), alpha))?;
        let verdict = match r.verdict {
            Verdict::Nominal => 0,
            Verdict::Anomalous => 1,
        };
        let _ = writeln!(out, "{},{},{verdict}", r.g_value, r.score);
    }
    std::fs::write(&args.out, out)
        .with_context(|| format!("stage write_scores: {}", args.out.display()))?;
    Ok(())
}

pub fn cmd_eval(args: &EvalArgs, file: &FileConfig) -> Result<()> {
    let alphas: Vec<f64> = if args.alphas.is_empty() {
        vec![pick(None, file.alpha, defaults::ALPHA)]
    } else {
        args.alphas.clone()
    };
    let (detector, _) = stage("load_model", load_model(&args.model))?;
    let data = stage(
        "load_csv",
        load_csv(&args.data, args.has_header, Some(args.label_column)),
    )?;
    let labels = data
        .labels()
        .context("stage load_csv: label column missing")?
        .to_vec();
    if !labels.contains(&Label::Anomalous) {
        bail!("stage eval: no positive class (all labels nominal)");
    }
    if !labels.contains(&Label::Nominal) {
        bail!("stage eval: no nominal class (all labels anomalous)");
    }

    let started = Instant::now();
    let scores: Vec<f64> = (0..data.n())
        .map(|i| stage("score", detector.score(data.point(i))))
        .collect::<Result<_>>()?;
    let mean_score_time_secs = started.elapsed().as_secs_f64() / data.n() as f64;

    let nominal: Vec<f64> = scores
        .iter()
        .zip(&labels)
        .filter(|(_, &l)| l == Label::Nominal)
        .map(|(&s, _)| s)
        .collect();
    let anomalous: Vec<f64> = scores
        .iter()
        .zip(&labels)
        .filter(|(_, &l)| l == Label::Anomalous)
        .map(|(&s, _)| s)
        .collect();

    let auc_value = stage("auc", auc(&nominal, &anomalous))?;
    let false_alarm: Vec<(f64, f64)> = alphas
        .iter()
        .map(|&a| {
            if !(a > 0.0 && a < 1.0) {
                bail!("stage config: alpha {a} outside (0, 1)");
            }
            let rate = nominal.iter().filter(|&&s| s <= a).count() as f64 / nominal.len() as f64;
            Ok((a, rate))
        })
        .collect::<Result<_>>()?;
    let ks_statistic = stage("uniformity_ks", uniformity_ks(&nominal))?;

    let report = MetricReport {
        auc: auc_value,
        false_alarm,
        ks_statistic,
        mean_score_time_secs,
    };
    let text = report.to_text();
    std::fs::write(&args.out, &text)
        .with_context(|| format!("stage write_report: {}", args.out.display()))?;
    print!("{text}");
    Ok(())
}

pub fn cmd_cv(args: &CvArgs, file: &FileConfig) -> Result<()> {
    let k = pick(args.k, file.k, defaults::K);
    let levels = pick(args.levels, file.levels, defaults::LEVELS);
    let rounds = pick(args.rounds, file.rounds, defaults::ROUNDS);
    let seed = pick(args.seed, file.seed, defaults::SEED);
    let folds = pick(args.folds, file.folds, defaults::FOLDS);
    let tol = pick(args.tol, file.tol, defaults::TOL);
    let max_passes = pick(args.max_passes, file.max_passes, defaults::MAX_PASSES);
    let stat_mode = args
        .stat_mode
        .clone()
        .or(file.stat_mode.clone())
        .unwrap_or_else(|| "mean-k".to_string());
    let config = neighbor_config(&stat_mode, k, pick_opt(args.eps, file.eps))?;

    let data = stage("load_csv", load_csv(&args.data, args.has_header, args.label_column))?;
    let table = stage(
        "resampled_nominal_scores",
        resampled_nominal_scores(&data, &config, rounds, seed),
    )?;

    let costs = match &args.costs {
        Some(list) => parse_list(list).context("stage config: --costs")?,
        None => CvGrid::default_c_ladder(),
    };
    let sigmas = match &args.sigmas {
        Some(list) => parse_list(list).context("stage config: --sigmas")?,
        None => stage("default_sigma_grid", default_sigma_grid(&data, k))?,
    };
    let grid = stage("cv_grid", CvGrid::new(costs, sigmas, folds))?;
    let controls = CvControls {
        m: levels,
        cap: pick_opt(args.cap, file.cap),
        tol,
        max_passes,
        seed,
    };
    let report = stage("cross_validate", cross_validate(&data, &table, &grid, &controls))?;

    let mut text = String::new();
    for cell in &report.cells {
        let folds_text = cell
            .fold_losses
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let mean = cell
            .mean_loss
            .map(|l| l.to_string())
            .unwrap_or_else(|| "skipped".to_string());
        let _ = writeln!(
            text,
            "cell c={} sigma={} mean_wpdl={mean} folds={folds_text}",
            cell.c, cell.sigma
        );
    }
    let _ = writeln!(
        text,
        "best c={} sigma={} wpdl={}",
        report.best_c, report.best_sigma, report.best_loss
    );
    let (se_c, se_sigma) = report.select_one_se();
    let _ = writeln!(text, "one_se c={se_c} sigma={se_sigma}");
    if report.skipped_folds > 0 {
        let _ = writeln!(text, "skipped_folds={}", report.skipped_folds);
    }
    std::fs::write(&args.out, &text)
        .with_context(|| format!("stage write_report: {}", args.out.display()))?;
    println!(
        "best c={} sigma={} wpdl={}",
        report.best_c, report.best_sigma, report.best_loss
    );
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs, file: &FileConfig) -> Result<()> {
    let seed = pick(args.seed, file.seed, defaults::SEED);
    let data = match args.density.as_str() {
        "toy-fig1" => stage("sample_mixture", sample_mixture(&GaussianMixtureSpec::toy_fig1(), args.n, seed))?,
        "toy-sec72" => stage(
            "sample_mixture",
            sample_mixture(&GaussianMixtureSpec::toy_sec72(), args.n, seed),
        )?,
        "uniform-box" => {
            let bounds_text = args
                .bounds
                .clone()
                .or(file.bounds.clone())
                .context("stage config: uniform-box needs --bounds lo,hi,lo,hi")?;
            let bounds = parse_bounds(&bounds_text)?;
            let spec = stage("box_spec", BoxSpec::new(bounds))?;
            stage("sample_uniform_box", sample_uniform_box(&spec, args.n, seed))?
        }
        other => bail!(
            "stage config: unknown --density {other:?} (expected toy-fig1|toy-sec72|uniform-box)"
        ),
    };
    let data = match args.label {
        None => data,
        Some(tag) => {
            let label = match tag {
                0 => Label::Nominal,
                1 => Label::Anomalous,
                other => bail!("stage config: --label must be 0 or 1, got {other}"),
            };
            stage(
                "label_dataset",
                Dataset::with_labels(
                    data.points().to_vec(),
                    data.dim(),
                    Some(vec![label; data.n()]),
                ),
            )?
        }
    };
    stage("write_csv", write_csv(&data, &args.out, args.header))?;
    println!("wrote {} rows to {}", data.n(), args.out.display());
    Ok(())
}

pub fn cmd_grid(args: &GridArgs, file: &FileConfig) -> Result<()> {
    let resolution = pick(args.resolution, file.resolution, defaults::RESOLUTION);
    let bounds_text = args
        .bounds
        .clone()
        .or(file.bounds.clone())
        .context("stage config: grid export needs --bounds lo,hi,lo,hi")?;
    let bounds = parse_bounds(&bounds_text)?;
    let (detector, _) = stage("load_model", load_model(&args.model))?;
    stage("export_grid", export_grid(&detector, &bounds, resolution, &args.out))?;
    println!(
        "wrote {} rows to {}",
        resolution * resolution,
        args.out.display()
    );
    Ok(())
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .with_context(|| format!("cannot parse {c:?}"))
        })
        .collect()
}
