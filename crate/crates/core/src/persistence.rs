//! Model archive and level-curve grid export.
//!
//! The archive is a single self-contained JSON file: kernel bandwidth,
//! support pairs by coordinate (no training-set indices, so scoring needs no
//! access to the original data), the sorted training decision values, and
//! training metadata. Floats are written in shortest round-trip form, so
//! save -> load reproduces scores bit-exactly.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detector::Detector;
use crate::error::{Error, Result};
use crate::ranker::RankModel;

pub const ARCHIVE_VERSION: u32 = 1;

/// Provenance of a trained model, stored alongside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub k: usize,
    pub m: u32,
    pub c: f64,
    pub n: usize,
    pub rounds: usize,
    pub seed: u64,
}

impl Default for TrainingMetadata {
    fn default() -> Self {
        TrainingMetadata {
            k: 20,
            m: 3,
            c: 0.0,
            n: 0,
            rounds: 20,
            seed: 42,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ArchiveFile {
    version: u32,
    metadata: TrainingMetadata,
    model: RankModel,
    sorted_g: Vec<f64>,
}

/// Persist a fitted detector. The metadata's `c` and `n` fields are filled
/// from the model so the archive is always internally consistent.
pub fn save_model(
    detector: &Detector,
    metadata: &TrainingMetadata,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let model = detector.model();
    if model.support_pairs.is_empty() {
        return Err(Error::UntrainedModel);
    }
    let mut metadata = metadata.clone();
    metadata.c = model.c;
    metadata.n = detector.n();
    let archive = ArchiveFile {
        version: ARCHIVE_VERSION,
        metadata,
        model: model.clone(),
        sorted_g: detector.sorted_g().to_vec(),
    };
    let text = serde_json::to_string(&archive).map_err(|e| Error::ArchiveCorrupt {
        message: format!("serialization failed: {e}"),
    })?;
    fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Load a detector and its training metadata back from an archive.
pub fn load_model(path: impl AsRef<Path>) -> Result<(Detector, TrainingMetadata)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;

    // Check the version before insisting on the full schema.
    let probe: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::ArchiveCorrupt {
            message: format!("not valid JSON: {e}"),
        })?;
    match probe.get("version").and_then(|v| v.as_u64()) {
        Some(v) if v == ARCHIVE_VERSION as u64 => {}
        Some(v) => {
            return Err(Error::ArchiveVersion {
                expected: ARCHIVE_VERSION,
                found: v as u32,
            })
        }
        None => {
            return Err(Error::ArchiveCorrupt {
                message: "missing version field".to_string(),
            })
        }
    }

    let archive: ArchiveFile = serde_json::from_str(&text).map_err(|e| Error::ArchiveCorrupt {
        message: format!("schema mismatch: {e}"),
    })?;
    validate_model(&archive.model)?;
    let detector = Detector::from_parts(archive.model, archive.sorted_g)?;
    Ok((detector, archive.metadata))
}

fn validate_model(model: &RankModel) -> Result<()> {
    if model.support_pairs.is_empty() {
        return Err(Error::ArchiveCorrupt {
            message: "archive holds no support pairs".to_string(),
        });
    }
    if !(model.kernel.sigma > 0.0) {
        return Err(Error::ArchiveCorrupt {
            message: "kernel bandwidth must be positive".to_string(),
        });
    }
    for sp in &model.support_pairs {
        if !(sp.alpha > 0.0) || !sp.alpha.is_finite() {
            return Err(Error::ArchiveCorrupt {
                message: format!("support pair has non-positive coefficient {}", sp.alpha),
            });
        }
        if sp.first.len() != model.dim || sp.second.len() != model.dim {
            return Err(Error::ArchiveCorrupt {
                message: "support pair dimension differs from model dimension".to_string(),
            });
        }
    }
    Ok(())
}

/// Evaluate the detector on a planar grid and write rows of
/// `x,y,g,score` (x index varying slowest), for level-curve plotting.
pub fn export_grid(
    detector: &Detector,
    bounds: &[(f64, f64)],
    resolution: usize,
    path: impl AsRef<Path>,
) -> Result<()> {
    let text = grid_csv(detector, bounds, resolution)?;
    let path = path.as_ref();
    fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}

/// Render the grid evaluation as CSV text; see [`export_grid`].
pub fn grid_csv(detector: &Detector, bounds: &[(f64, f64)], resolution: usize) -> Result<String> {
    if detector.model().dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: detector.model().dim,
        });
    }
    if bounds.len() != 2 {
        return Err(Error::param("bounds", "grid export needs exactly two axes"));
    }
    if resolution < 2 {
        return Err(Error::param("resolution", "need at least 2 points per axis"));
    }
    for &(lo, hi) in bounds {
        if !(lo < hi) {
            return Err(Error::param("bounds", format!("degenerate axis [{lo}, {hi}]")));
        }
    }
    let axis = |(lo, hi): (f64, f64), t: usize| {
        lo + (hi - lo) * t as f64 / (resolution - 1) as f64
    };
    let mut out = String::with_capacity(resolution * resolution * 32);
    out.push_str("x,y,g,score\n");
    for ix in 0..resolution {
        let x = axis(bounds[0], ix);
        for iy in 0..resolution {
            let y = axis(bounds[1], iy);
            let g = detector.g(&[x, y])?;
            let score = detector.score_of_g(g);
            out.push_str(&format!("{x},{y},{g},{score}\n"));
        }
    }
    Ok(out)
}
