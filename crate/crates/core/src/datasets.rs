//! Embedded reference data.

use crate::error::{Error, Result};
use crate::numstats::{CorrelationModel, Matrix};

/// Lower-triangular correlation matrix of the HIV study (six variables).
pub const HIV_CORRELATION_CSV: &str = include_str!("../data/hiv_correlation.csv");

/// Number of children in the HIV study.
pub const HIV_SAMPLES: usize = 107;

/// Parses a correlation matrix written one row per line, comma separated,
/// either as a full square matrix or as its lower triangle. Lines starting
/// with `#` and blank lines are skipped.
pub fn parse_correlation_text(text: &str) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>().map_err(|_| {
                    Error::InvalidCorrelation(format!("line {}: cannot parse {t:?}", lineno + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(Error::Empty("correlation matrix"));
    }
    let lower = rows.iter().enumerate().all(|(i, r)| r.len() == i + 1);
    let square = rows.iter().all(|r| r.len() == n);
    let mut m = Matrix::zeros(n);
    if square {
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
    } else if lower {
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
    } else {
        return Err(Error::InvalidCorrelation(format!(
            "{n} rows must be either all of length {n} or lower-triangular"
        )));
    }
    Ok(m)
}

pub fn hiv_model() -> CorrelationModel {
    let m = parse_correlation_text(HIV_CORRELATION_CSV).expect("embedded HIV matrix parses");
    CorrelationModel::new(m, HIV_SAMPLES).expect("embedded HIV matrix is a valid correlation")
}
