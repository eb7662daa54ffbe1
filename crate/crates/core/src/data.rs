//! Point-cloud container and CSV ingestion.
//!
//! CSV is the only ingestion format: comma delimiter, '.' decimal point, an
//! optional header row, and an optional integer label column with 0 = nominal
//! and 1 = anomalous. Coordinates are written with Rust's shortest
//! round-trip float formatting, so write -> load is the identity.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Per-point tag used only for evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Nominal,
    Anomalous,
}

/// An n x d set of points with optional labels.
///
/// Coordinates are stored row-major; every point has exactly `dim`
/// coordinates and all coordinates are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<f64>,
    dim: usize,
    labels: Option<Vec<Label>>,
}

impl Dataset {
    /// Build a dataset from row-major coordinates.
    pub fn new(points: Vec<f64>, dim: usize) -> Result<Self> {
        Self::with_labels(points, dim, None)
    }

    /// Build a dataset from row-major coordinates and optional labels.
    pub fn with_labels(points: Vec<f64>, dim: usize, labels: Option<Vec<Label>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "must be positive"));
        }
        if points.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if points.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: points.len() % dim,
            });
        }
        let n = points.len() / dim;
        if let Some(pos) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteCoordinate { index: pos / dim });
        }
        if let Some(ref l) = labels {
            if l.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: l.len(),
                });
            }
        }
        Ok(Dataset {
            points,
            dim,
            labels,
        })
    }

    /// Build from a list of rows, all of equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(Vec::len).ok_or(Error::EmptyDataset)?;
        let mut flat = Vec::with_capacity(rows.len() * dim);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    expected: dim,
                    found: r.len(),
                });
            }
            flat.extend_from_slice(r);
        }
        Dataset::new(flat, dim)
    }

    pub fn n(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    /// Iterate over point slices.
    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    /// New dataset holding the selected rows (labels carried along).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut flat = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            flat.extend_from_slice(self.point(i));
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i]).collect());
        Dataset::with_labels(flat, self.dim, labels)
    }
}

/// Squared Euclidean distance between two points of equal dimension.
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

/// Euclidean distance between two points of equal dimension.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    squared_distance(a, b).sqrt()
}

/// Load a dataset from a comma-separated file.
///
/// `label_column` is a zero-based column index; that column is parsed as a
/// 0/1 label and excluded from the coordinates. Error positions are reported
/// as one-based (row, column) file coordinates, counting the header row.
pub fn load_csv(
    path: impl AsRef<Path>,
    has_header: bool,
    label_column: Option<usize>,
) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    parse_csv(&text, has_header, label_column)
}

/// Parse CSV text; see [`load_csv`].
pub fn parse_csv(text: &str, has_header: bool, label_column: Option<usize>) -> Result<Dataset> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<Label> = Vec::new();
    let mut arity: Option<usize> = None;

    for (line_idx, line) in text.lines().enumerate() {
        let row_no = line_idx + 1;
        if line_idx == 0 && has_header {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        match arity {
            None => {
                if let Some(lc) = label_column {
                    if lc >= cells.len() {
                        return Err(Error::param(
                            "label_column",
                            format!("index {lc} out of range for {} columns", cells.len()),
                        ));
                    }
                    if cells.len() < 2 {
                        return Err(Error::param(
                            "label_column",
                            "file has no coordinate columns besides the label",
                        ));
                    }
                }
                arity = Some(cells.len());
            }
            Some(a) if a != cells.len() => {
                return Err(Error::RaggedRow {
                    row: row_no,
                    expected: a,
                    found: cells.len(),
                });
            }
            _ => {}
        }

        let mut coords = Vec::with_capacity(cells.len());
        for (col_idx, cell) in cells.iter().enumerate() {
            let trimmed = cell.trim();
            if Some(col_idx) == label_column {
                labels.push(parse_label(trimmed, row_no, col_idx + 1)?);
                continue;
            }
            let v: f64 = trimmed.parse().map_err(|_| Error::CsvParse {
                row: row_no,
                col: col_idx + 1,
                message: format!("cannot parse {trimmed:?} as a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::CsvParse {
                    row: row_no,
                    col: col_idx + 1,
                    message: "coordinate is not finite".to_string(),
                });
            }
            coords.push(v);
        }
        rows.push(coords);
    }

    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let dim = rows[0].len();
    let mut flat = Vec::with_capacity(rows.len() * dim);
    for r in &rows {
        flat.extend_from_slice(r);
    }
    let labels = if label_column.is_some() {
        Some(labels)
    } else {
        None
    };
    Dataset::with_labels(flat, dim, labels)
}

fn parse_label(cell: &str, row: usize, col: usize) -> Result<Label> {
    match cell.trim() {
        "0" => Ok(Label::Nominal),
        "1" => Ok(Label::Anomalous),
        other => Err(Error::CsvParse {
            row,
            col,
            message: format!("label must be 0 or 1, got {other:?}"),
        }),
    }
}

/// Render a dataset as CSV text (label appended as a last column when present).
pub fn to_csv(data: &Dataset, header: bool) -> String {
    let mut out = String::new();
    if header {
        let mut cols: Vec<String> = (0..data.dim()).map(|i| format!("x{i}")).collect();
        if data.labels().is_some() {
            cols.push("label".to_string());
        }
        let _ = writeln!(out, "{}", cols.join(","));
    }
    for i in 0..data.n() {
        let row: Vec<String> = data.point(i).iter().map(|v| format!("{v}")).collect();
        let _ = write!(out, "{}", row.join(","));
        if let Some(labels) = data.labels() {
            let tag = match labels[i] {
                Label::Nominal => 0,
                Label::Anomalous => 1,
            };
            let _ = write!(out, ",{tag}");
        }
        out.push('\n');
    }
    out
}

/// Write a dataset to a CSV file; see [`to_csv`].
pub fn write_csv(data: &Dataset, path: impl AsRef<Path>, header: bool) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_csv(data, header)).map_err(|e| Error::io(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_three_rows_two_columns() {
        let d = parse_csv("0,0\n1,0\n0,1", false, None).unwrap();
        assert_eq!(d.n(), 3);
        assert_eq!(d.dim(), 2);
        assert_eq!(d.point(2), &[0.0, 1.0]);
    }

    #[test]
    fn header_row_is_skipped() {
        let d = parse_csv("a,b\n0,0\n1,0\n0,1", true, None).unwrap();
        assert_eq!(d.n(), 3);
    }

    #[test]
    fn bad_cell_names_row_and_column() {
        let err = parse_csv("0,0\n1,abc\n0,1", false, None).unwrap_err();
        match err {
            Error::CsvParse { row, col, .. } => {
                assert_eq!((row, col), (2, 2));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let err = parse_csv("0,0\n1\n", false, None).unwrap_err();
        assert!(matches!(err, Error::RaggedRow { row: 2, .. }));
    }

    #[test]
    fn empty_file_is_an_error() {
        assert!(matches!(
            parse_csv("", false, None),
            Err(Error::EmptyDataset)
        ));
        assert!(matches!(
            parse_csv("a,b\n", true, None),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn label_column_is_extracted() {
        let d = parse_csv("0,0,0\n1,0,1\n0,1,0", false, Some(2)).unwrap();
        assert_eq!(d.dim(), 2);
        assert_eq!(
            d.labels().unwrap(),
            &[Label::Nominal, Label::Anomalous, Label::Nominal]
        );
    }

    #[test]
    fn label_outside_zero_one_is_rejected() {
        let err = parse_csv("0,0,2\n", false, Some(2)).unwrap_err();
        assert!(matches!(err, Error::CsvParse { row: 1, col: 3, .. }));
    }

    #[test]
    fn non_finite_coordinate_rejected() {
        let err = parse_csv("0,inf\n", false, None).unwrap_err();
        assert!(matches!(err, Error::CsvParse { row: 1, col: 2, .. }));
    }

    #[test]
    fn csv_round_trip_is_identity() {
        let d = Dataset::from_rows(&[
            vec![0.1, -2.5e-17],
            vec![1.0 / 3.0, 7.0],
            vec![f64::MIN_POSITIVE, 1e300],
        ])
        .unwrap();
        let text = to_csv(&d, true);
        let back = parse_csv(&text, true, None).unwrap();
        assert_eq!(d.points(), back.points());
    }
}
