//! Gaussian minimum discrimination information test of a single
//! dichotomic independence hypothesis `X_a ⊥ X_ā`.
//!
//! The statistic is `(k - 1) · ln[det(R_aa) det(R_āā) / det(R)]`, which
//! under the null is approximately noncentral chi-squared with `n_a · n_ā`
//! degrees of freedom, and asymptotically central chi-squared with the same
//! degrees of freedom.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Submatrix};
use crate::lattice::Bipartition;
use crate::numstats::{chi2_sf, cholesky, noncentral_chi2_sf, CorrelationModel};

/// Reference distribution used for p-values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestMode {
    #[default]
    Central,
    Noncentral,
}

impl std::fmt::Display for TestMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TestMode::Central => "central",
            TestMode::Noncentral => "noncentral",
        })
    }
}

impl std::str::FromStr for TestMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "central" => Ok(TestMode::Central),
            "noncentral" => Ok(TestMode::Noncentral),
            other => Err(format!("unknown mode {other:?} (central | noncentral)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestResult {
    pub bipartition: Bipartition,
    pub statistic: f64,
    pub df: u32,
    pub noncentrality: f64,
    pub p_value: f64,
    pub mode: TestMode,
}

pub fn degrees_of_freedom(b: &Bipartition) -> u32 {
    let (na, nb) = b.sizes();
    (na * nb) as u32
}

fn cubic(n: f64) -> f64 {
    2.0 * n * n * n + 3.0 * n * n - n
}

/// Noncentrality of the approximate null distribution.
pub fn noncentrality(b: &Bipartition, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::OutOfRange {
            what: "sample count",
            value: k.to_string(),
            range: ">= 2",
        });
    }
    let (na, nb) = b.sizes();
    let n = b.n() as f64;
    let bracket = cubic(n) - cubic(na as f64) - cubic(nb as f64);
    Ok(bracket / (12.0 * (k - 1) as f64))
}

fn check_model(model: &CorrelationModel, b: &Bipartition) -> Result<()> {
    if model.n() != b.n() {
        return Err(Error::DimensionMismatch {
            left: model.n(),
            right: b.n(),
        });
    }
    if model.k() < 3 {
        return Err(Error::OutOfRange {
            what: "sample count",
            value: model.k().to_string(),
            range: ">= 3",
        });
    }
    Ok(())
}

fn singular(b: &Bipartition, which: Submatrix) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::NotPositiveDefinite { pivot, value } => Error::SingularSubmatrix {
            bipartition: b.to_string(),
            submatrix: which,
            pivot,
            value,
        },
        other => other,
    }
}

fn check_full(model: &CorrelationModel, b: &Bipartition) -> Result<()> {
    cholesky(model.matrix()).map(|_| ()).map_err(singular(b, Submatrix::Full))
}

/// `ln[det(R_aa) det(R_āā) / det(R)] = -ln det(I - M)` with
/// `M = L_a⁻¹ R_aā R_āā⁻¹ R_āa L_a⁻ᵀ`, whose eigenvalues are the squared
/// canonical correlations. Factoring `I - M` while accumulating each pivot's
/// deficit `e_j = 1 - pivot` directly keeps full relative accuracy when the
/// ratio is close to one, where the log-det difference would cancel.
fn log_ratio(model: &CorrelationModel, b: &Bipartition) -> Result<f64> {
    let r = model.matrix();
    let (ia, ib) = (b.block(), b.complement_block());
    let la = cholesky(&r.principal_submatrix(&ia)).map_err(singular(b, Submatrix::Block))?;
    let lb = cholesky(&r.principal_submatrix(&ib)).map_err(singular(b, Submatrix::Complement))?;
    let (na, nb) = (ia.len(), ib.len());

    // y = L_a⁻¹ R_aā L_ā⁻ᵀ, row i of y solved against L_ā after the column solve
    let mut y = vec![vec![0.0; nb]; na];
    for c in 0..nb {
        for i in 0..na {
            let mut s = r[(ia[i], ib[c])];
            for k in 0..i {
                s -= la[(i, k)] * y[k][c];
            }
            y[i][c] = s / la[(i, i)];
        }
    }
    for row in y.iter_mut() {
        for c in 0..nb {
            let mut s = row[c];
            for k in 0..c {
                s -= lb[(c, k)] * row[k];
            }
            row[c] = s / lb[(c, c)];
        }
    }
    let m = |i: usize, j: usize| -> f64 { y[i].iter().zip(&y[j]).map(|(a, b)| a * b).sum() };

    let tol = 1e-12 * model.n() as f64;
    let mut l = vec![vec![0.0; na]; na];
    let mut log_det = 0.0;
    for j in 0..na {
        let deficit = m(j, j) + l[j][..j].iter().map(|v| v * v).sum::<f64>();
        let pivot = 1.0 - deficit;
        if !(pivot > tol) {
            return Err(singular(b, Submatrix::Full)(Error::NotPositiveDefinite { pivot: j, value: pivot }));
        }
        log_det += (-deficit).ln_1p();
        let d = pivot.sqrt();
        l[j][j] = d;
        for i in j + 1..na {
            let dot: f64 = l[i][..j].iter().zip(&l[j][..j]).map(|(a, b)| a * b).sum();
            l[i][j] = (-m(i, j) - dot) / d;
        }
    }
    Ok(-log_det)
}

/// `2Î_{a|ā}`; never negative.
pub fn mdi_statistic(model: &CorrelationModel, b: &Bipartition) -> Result<f64> {
    check_model(model, b)?;
    check_full(model, b)?;
    Ok((model.k() - 1) as f64 * log_ratio(model, b)?)
}

fn finish(
    model: &CorrelationModel,
    b: &Bipartition,
    statistic: f64,
    mode: TestMode,
) -> Result<TestResult> {
    let df = degrees_of_freedom(b);
    let lambda = noncentrality(b, model.k())?;
    let p_value = match mode {
        TestMode::Central => chi2_sf(statistic, df)?,
        TestMode::Noncentral => noncentral_chi2_sf(statistic, df, lambda)?,
    };
    Ok(TestResult {
        bipartition: *b,
        statistic,
        df,
        noncentrality: lambda,
        p_value,
        mode,
    })
}

pub fn test_bipartition(model: &CorrelationModel, b: &Bipartition, mode: TestMode) -> Result<TestResult> {
    let statistic = mdi_statistic(model, b)?;
    finish(model, b, statistic, mode)
}

/// Tests every bipartition in order, checking `R` once. Runs on the current
/// rayon pool; output order matches input order.
pub fn test_all(
    model: &CorrelationModel,
    bipartitions: &[Bipartition],
    mode: TestMode,
) -> Result<Vec<TestResult>> {
    let Some(first) = bipartitions.first() else {
        return Ok(Vec::new());
    };
    for b in bipartitions {
        check_model(model, b)?;
    }
    check_full(model, first)?;
    let run = |b: &Bipartition| {
        let s = (model.k() - 1) as f64 * log_ratio(model, b)?;
        finish(model, b, s, mode)
    };
    if bipartitions.len() < 64 {
        bipartitions.iter().map(run).collect()
    } else {
        bipartitions.par_iter().map(run).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::enumerate_bipartitions;
    use crate::numstats::Matrix;

    fn model(rows: &[Vec<f64>], k: usize) -> CorrelationModel {
        CorrelationModel::new(Matrix::from_rows(rows).unwrap(), k).unwrap()
    }

    #[test]
    fn identity_gives_zero_statistic() {
        for n in 2..7 {
            let m = CorrelationModel::new(Matrix::identity(n), 50).unwrap();
            for b in enumerate_bipartitions(n).unwrap() {
                assert_eq!(mdi_statistic(&m, &b).unwrap(), 0.0);
                let t = test_bipartition(&m, &b, TestMode::Central).unwrap();
                assert_eq!(t.p_value, 1.0);
            }
        }
    }

    #[test]
    fn two_variable_closed_form() {
        let m = model(&[vec![1.0, 0.5], vec![0.5, 1.0]], 101);
        let b = Bipartition::new(2, 0b01).unwrap();
        let s = mdi_statistic(&m, &b).unwrap();
        assert!((s - 100.0 * -(0.75f64.ln())).abs() < 1e-10);
        assert!((s - 28.768).abs() < 1e-3);
    }

    #[test]
    fn dof_examples() {
        assert_eq!(degrees_of_freedom(&Bipartition::new(6, 0b000111).unwrap()), 9);
        assert_eq!(degrees_of_freedom(&Bipartition::new(10, 0b1).unwrap()), 9);
        let b = Bipartition::new(4, 0b0011).unwrap();
        assert_eq!(degrees_of_freedom(&b), 4);
        let tri = |x: usize| x * (x + 1) / 2;
        assert_eq!(tri(4) - tri(2) - tri(2), 4);
    }

    #[test]
    fn noncentrality_examples() {
        let b = Bipartition::new(2, 0b01).unwrap();
        assert!((noncentrality(&b, 101).unwrap() - 0.015).abs() < 1e-15);
        let b6 = Bipartition::new(6, 0b000101).unwrap();
        let ratio = noncentrality(&b6, 13).unwrap() / noncentrality(&b6, 25).unwrap();
        assert!((ratio - 2.0).abs() < 1e-15);
        assert!(noncentrality(&b6, 1_000_000).unwrap() < 1e-4);
        assert!(noncentrality(&b6, 1).is_err());
    }

    #[test]
    fn singular_submatrix_is_reported() {
        let m = model(
            &[
                vec![1.0, 1.0, 0.0],
                vec![1.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
            20,
        );
        let b = Bipartition::new(3, 0b011).unwrap();
        match mdi_statistic(&m, &b) {
            Err(Error::SingularSubmatrix { submatrix, .. }) => assert_eq!(submatrix, Submatrix::Full),
            other => panic!("{other:?}"),
        }
        let b = Bipartition::new(3, 0b001).unwrap();
        assert!(test_all(&m, &[b], TestMode::Central).is_err());
    }

    #[test]
    fn rejects_mismatch_and_small_k() {
        let m = model(&[vec![1.0, 0.2], vec![0.2, 1.0]], 2);
        let b = Bipartition::new(2, 1).unwrap();
        assert!(mdi_statistic(&m, &b).is_err());
        let m = model(&[vec![1.0, 0.2], vec![0.2, 1.0]], 20);
        assert!(matches!(
            mdi_statistic(&m, &Bipartition::new(3, 1).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn batch_matches_single() {
        let m = model(
            &[
                vec![1.0, 0.4, 0.1, 0.0],
                vec![0.4, 1.0, -0.2, 0.1],
                vec![0.1, -0.2, 1.0, 0.3],
                vec![0.0, 0.1, 0.3, 1.0],
            ],
            60,
        );
        let bs = enumerate_bipartitions(4).unwrap();
        let batch = test_all(&m, &bs, TestMode::Noncentral).unwrap();
        for (b, t) in bs.iter().zip(&batch) {
            let single = test_bipartition(&m, b, TestMode::Noncentral).unwrap();
            assert!((single.statistic - t.statistic).abs() < 1e-12);
            assert!(t.p_value >= 0.0 && t.p_value <= 1.0);
        }
    }
}
