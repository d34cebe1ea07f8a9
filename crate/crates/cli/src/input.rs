//! Loading observation tables and correlation matrices from disk.

use std::path::Path;

use mutindep::datasets::parse_correlation_text;
use mutindep::{CorrelationModel, DataMatrix};

use crate::CliError;

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn is_number(cell: &str) -> bool {
    cell.trim().parse::<f64>().is_ok()
}

/// Reads a k × n table of observations. A first row with no numeric cell
/// is taken as a header; CRLF line endings and quoted cells are accepted.
pub fn read_data_csv(path: &Path) -> Result<DataMatrix, CliError> {
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::input(format!("{}: line {}: {e}", path.display(), i + 1)))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        records.push((i + 1, rec));
    }
    let Some((_, first)) = records.first() else {
        return Err(CliError::input(format!("{}: file is empty", path.display())));
    };
    let skip = usize::from(!first.iter().any(is_number));
    let body = &records[skip..];
    if body.is_empty() {
        return Err(CliError::input(format!("{}: no data rows after the header", path.display())));
    }
    let n = body[0].1.len();
    if n < 2 {
        return Err(CliError::input(format!(
            "{}: found {n} column, need at least 2 variables",
            path.display()
        )));
    }
    let mut values = Vec::with_capacity(body.len() * n);
    for (line, rec) in body {
        if rec.len() != n {
            return Err(CliError::input(format!(
                "{}: ragged row at line {line}: {} fields, expected {n}",
                path.display(),
                rec.len()
            )));
        }
        for (col, cell) in rec.iter().enumerate() {
            let v = cell.parse::<f64>().map_err(|_| {
                CliError::input(format!(
                    "{}: non-numeric cell {cell:?} at line {line}, column {}",
                    path.display(),
                    col + 1
                ))
            })?;
            values.push(v);
        }
    }
    Ok(DataMatrix::new(body.len(), n, values)?)
}

/// Reads a square or lower-triangular correlation matrix.
pub fn read_correlation(path: &Path, samples: usize) -> Result<CorrelationModel, CliError> {
    let text = read_text(path)?;
    let r = parse_correlation_text(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if r.dim() < 2 {
        return Err(CliError::input(format!(
            "{}: correlation matrix has {} variable, need at least 2",
            path.display(),
            r.dim()
        )));
    }
    Ok(CorrelationModel::new(r, samples)?)
}
