//! Multiple-comparison correction over the simultaneous dichotomy tests.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Correction {
    /// Benjamini–Hochberg step-up false discovery rate control.
    #[default]
    Fdr,
    Bonferroni,
}

impl std::fmt::Display for Correction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Correction::Fdr => "fdr",
            Correction::Bonferroni => "bonferroni",
        })
    }
}

impl std::str::FromStr for Correction {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fdr" | "bh" => Ok(Correction::Fdr),
            "bonferroni" => Ok(Correction::Bonferroni),
            other => Err(format!("unknown correction {other:?} (fdr | bonferroni)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionOutcome {
    /// Index-aligned with the input p-values.
    pub rejected: Vec<bool>,
    pub m_thres: usize,
    /// Largest rejected p-value.
    pub threshold_pvalue: Option<f64>,
}

impl CorrectionOutcome {
    fn from_threshold(pvalues: &[f64], threshold: Option<f64>) -> Self {
        let rejected: Vec<bool> = pvalues
            .iter()
            .map(|&p| threshold.is_some_and(|t| p <= t))
            .collect();
        let m_thres = rejected.iter().filter(|&&r| r).count();
        CorrectionOutcome {
            rejected,
            m_thres,
            threshold_pvalue: threshold,
        }
    }
}

fn validate(pvalues: &[f64], alpha: f64) -> Result<()> {
    if pvalues.is_empty() {
        return Err(Error::Empty("p-value list"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRange {
            what: "alpha",
            value: alpha.to_string(),
            range: "(0, 1)",
        });
    }
    if let Some((i, p)) = pvalues
        .iter()
        .enumerate()
        .find(|(_, p)| !(0.0..=1.0).contains(*p))
    {
        return Err(Error::OutOfRange {
            what: "p-value",
            value: format!("{p} at index {i}"),
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// Benjamini–Hochberg: rejects the `m_thres` smallest p-values, where
/// `m_thres` is the largest `i` with `p_(i) ≤ α·i/m`. The comparison is
/// non-strict, and ties at the cut are rejected together.
pub fn bh_fdr(pvalues: &[f64], alpha: f64) -> Result<CorrectionOutcome> {
    validate(pvalues, alpha)?;
    let m = pvalues.len();
    let mut sorted = pvalues.to_vec();
    sorted.sort_by(f64::total_cmp);
    let threshold = sorted
        .iter()
        .enumerate()
        .rev()
        .find(|(i, &p)| p <= alpha * (i + 1) as f64 / m as f64)
        .map(|(_, &p)| p);
    Ok(CorrectionOutcome::from_threshold(pvalues, threshold))
}

/// Rejects every `p ≤ α/m`.
pub fn bonferroni(pvalues: &[f64], alpha: f64) -> Result<CorrectionOutcome> {
    validate(pvalues, alpha)?;
    let cut = alpha / pvalues.len() as f64;
    let threshold = pvalues
        .iter()
        .copied()
        .filter(|&p| p <= cut)
        .max_by(f64::total_cmp);
    Ok(CorrectionOutcome::from_threshold(pvalues, threshold))
}

pub fn correct(pvalues: &[f64], alpha: f64, method: Correction) -> Result<CorrectionOutcome> {
    match method {
        Correction::Fdr => bh_fdr(pvalues, alpha),
        Correction::Bonferroni => bonferroni(pvalues, alpha),
    }
}
