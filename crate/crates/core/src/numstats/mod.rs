//! Numerical substrate: data and correlation containers, dense linear
//! algebra, chi-squared tails and seeded sampling.

pub mod chi2;
pub mod linalg;
pub mod sampling;

pub use chi2::{chi2_cdf, chi2_sf, noncentral_chi2_sf};
pub use linalg::{cholesky, logdet_spd, Matrix};
pub use sampling::{
    random_partition_with_k_blocks, sample_gamma, sample_mvn, sample_standard_normal,
    sample_wishart_correlation, RngStream,
};

use crate::error::{Error, Result};

/// `k × n` observations, row-major; rows are i.i.d. samples.
#[derive(Clone, Debug, PartialEq)]
pub struct DataMatrix {
    k: usize,
    n: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn new(k: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != k * n {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: k * n,
            });
        }
        if n == 0 {
            return Err(Error::Empty("data matrix with no columns"));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::DegenerateData(format!(
                "non-finite value at row {}, column {}",
                pos / n + 1,
                pos % n + 1
            )));
        }
        Ok(DataMatrix { k, n, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DegenerateData(format!(
                    "row {} has {} values, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        DataMatrix::new(rows.len(), n, values)
    }

    /// Number of samples (rows).
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of variables (columns).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    /// The first `rows` samples.
    pub fn prefix(&self, rows: usize) -> Result<DataMatrix> {
        if rows > self.k {
            return Err(Error::OutOfRange {
                what: "prefix length",
                value: rows.to_string(),
                range: "<= sample count",
            });
        }
        Ok(DataMatrix {
            k: rows,
            n: self.n,
            values: self.values[..rows * self.n].to_vec(),
        })
    }
}

/// Correlation matrix together with the sample count behind it.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationModel {
    r: Matrix,
    k: usize,
}

const CORRELATION_TOL: f64 = 1e-12;

impl CorrelationModel {
    /// Validates symmetry, unit diagonal and the `[-1, 1]` range.
    pub fn new(r: Matrix, k: usize) -> Result<Self> {
        let n = r.dim();
        if n == 0 {
            return Err(Error::Empty("correlation matrix"));
        }
        for i in 0..n {
            for j in 0..n {
                let v = r[(i, j)];
                if !v.is_finite() {
                    return Err(Error::InvalidCorrelation(format!(
                        "entry ({}, {}) is not finite",
                        i + 1,
                        j + 1
                    )));
                }
                if v.abs() > 1.0 + CORRELATION_TOL {
                    return Err(Error::InvalidCorrelation(format!(
                        "entry ({}, {}) = {v} outside [-1, 1]",
                        i + 1,
                        j + 1
                    )));
                }
            }
            if (r[(i, i)] - 1.0).abs() > CORRELATION_TOL {
                return Err(Error::InvalidCorrelation(format!(
                    "diagonal entry {} = {} is not 1",
                    i + 1,
                    r[(i, i)]
                )));
            }
        }
        let asym = r.max_asymmetry();
        if asym > CORRELATION_TOL {
            return Err(Error::InvalidCorrelation(format!(
                "matrix is not symmetric (max |r_ij - r_ji| = {asym:e})"
            )));
        }
        Ok(CorrelationModel { r, k })
    }

    pub fn n(&self) -> usize {
        self.r.dim()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &Matrix {
        &self.r
    }
}

/// Pearson correlations of the columns; variances and covariances both use
/// the `k - 1` denominator.
pub fn sample_correlation(data: &DataMatrix) -> Result<CorrelationModel> {
    let (k, n) = (data.k(), data.n());
    if k < 3 {
        return Err(Error::DegenerateData(format!(
            "need at least 3 samples, got {k}"
        )));
    }
    let mut means = vec![0.0; n];
    for i in 0..k {
        for (m, v) in means.iter_mut().zip(data.row(i)) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= k as f64;
    }
    let mut cov = Matrix::zeros(n);
    let mut centered = vec![0.0; n];
    for i in 0..k {
        for ((c, v), m) in centered.iter_mut().zip(data.row(i)).zip(&means) {
            *c = v - m;
        }
        for a in 0..n {
            for b in 0..=a {
                cov[(a, b)] += centered[a] * centered[b];
            }
        }
    }
    let denom = (k - 1) as f64;
    let sd: Vec<f64> = (0..n).map(|a| (cov[(a, a)] / denom).sqrt()).collect();
    let constant: Vec<String> = (0..n)
        .filter(|&a| !(sd[a] > 0.0))
        .map(|a| (a + 1).to_string())
        .collect();
    if !constant.is_empty() {
        return Err(Error::DegenerateData(format!(
            "zero sample variance in column(s) {}",
            constant.join(", ")
        )));
    }
    let mut r = Matrix::identity(n);
    for a in 0..n {
        for b in 0..a {
            let v = (cov[(a, b)] / denom / (sd[a] * sd[b])).clamp(-1.0, 1.0);
            r[(a, b)] = v;
            r[(b, a)] = v;
        }
    }
    CorrelationModel::new(r, k)
}
