//! From data or a correlation model to the estimated finest pattern of
//! mutual independence.
//!
//! Every bipartition of the variables is tested, the p-values are corrected
//! jointly, and the meet of the surviving (non-rejected) bipartitions is the
//! estimate. No survivors means no detected independence, so the estimate
//! is then the one-block partition.

use serde::Serialize;

use crate::correction::{correct, Correction};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_bipartitions, entailed_dichotomies, meet_all, Bipartition, Partition};
use crate::mdi::{test_all, TestMode, TestResult};
use crate::numstats::{sample_correlation, CorrelationModel, DataMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InferenceSettings {
    pub alpha: f64,
    pub correction: Correction,
    pub mode: TestMode,
}

impl Default for InferenceSettings {
    fn default() -> Self {
        InferenceSettings {
            alpha: 0.1,
            correction: Correction::Fdr,
            mode: TestMode::Central,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InferenceOutcome {
    pub n: usize,
    pub k: usize,
    /// All tests, in ascending bipartition-mask order.
    pub tests: Vec<TestResult>,
    /// Index-aligned with `tests`.
    pub rejected: Vec<bool>,
    pub delta_hat: Vec<Bipartition>,
    pub mu_hat: Partition,
    pub alpha: f64,
    pub correction: Correction,
    pub mode: TestMode,
    pub m: usize,
    pub m_thres: usize,
}

impl InferenceOutcome {
    pub fn p_values(&self) -> Vec<f64> {
        self.tests.iter().map(|t| t.p_value).collect()
    }
}

/// Meet of the survivors, or the one-block partition when there are none.
pub fn estimate_pattern(n: usize, delta_hat: &[Bipartition]) -> Result<Partition> {
    if delta_hat.is_empty() {
        return Ok(Partition::one_block(n));
    }
    let parts: Vec<Partition> = delta_hat.iter().map(Bipartition::to_partition).collect();
    meet_all(&parts)
}

/// Survivors and estimate from an explicit rejection vector.
pub fn decide(bipartitions: &[Bipartition], rejected: &[bool]) -> Result<(Vec<Bipartition>, Partition)> {
    let n = bipartitions.first().map(Bipartition::n).ok_or(Error::Empty("bipartition list"))?;
    if bipartitions.len() != rejected.len() {
        return Err(Error::DimensionMismatch {
            left: bipartitions.len(),
            right: rejected.len(),
        });
    }
    let delta_hat: Vec<Bipartition> = bipartitions
        .iter()
        .zip(rejected)
        .filter(|(_, &r)| !r)
        .map(|(b, _)| *b)
        .collect();
    let mu_hat = estimate_pattern(n, &delta_hat)?;
    Ok((delta_hat, mu_hat))
}

/// Applies the correction to precomputed p-values over all bipartitions of
/// `n` (ascending-mask order) and returns survivors and estimate.
pub fn infer_from_pvalues(
    n: usize,
    pvalues: &[f64],
    alpha: f64,
    correction: Correction,
) -> Result<(Vec<Bipartition>, Partition)> {
    let bipartitions = enumerate_bipartitions(n)?;
    if pvalues.len() != bipartitions.len() {
        return Err(Error::DimensionMismatch {
            left: pvalues.len(),
            right: bipartitions.len(),
        });
    }
    let outcome = correct(pvalues, alpha, correction)?;
    decide(&bipartitions, &outcome.rejected)
}

pub fn infer_from_model(model: &CorrelationModel, settings: InferenceSettings) -> Result<InferenceOutcome> {
    let n = model.n();
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "number of variables",
            value: n.to_string(),
            range: ">= 2",
        });
    }
    let bipartitions = enumerate_bipartitions(n)?;
    let tests = test_all(model, &bipartitions, settings.mode)?;
    let pvalues: Vec<f64> = tests.iter().map(|t| t.p_value).collect();
    let corrected = correct(&pvalues, settings.alpha, settings.correction)?;
    let (delta_hat, mu_hat) = decide(&bipartitions, &corrected.rejected)?;
    Ok(InferenceOutcome {
        n,
        k: model.k(),
        m: tests.len(),
        m_thres: corrected.m_thres,
        tests,
        rejected: corrected.rejected,
        delta_hat,
        mu_hat,
        alpha: settings.alpha,
        correction: settings.correction,
        mode: settings.mode,
    })
}

pub fn infer_from_data(data: &DataMatrix, settings: InferenceSettings) -> Result<InferenceOutcome> {
    if data.n() < 2 {
        return Err(Error::OutOfRange {
            what: "number of variables",
            value: data.n().to_string(),
            range: ">= 2",
        });
    }
    let model = sample_correlation(data)?;
    infer_from_model(&model, settings)
}

/// Confusion counts of a test outcome against a ground-truth pattern.
/// Positives are bipartitions whose independence does not hold under the
/// truth; a positive is detected when its test is rejected.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Confusion {
    pub tp: usize,
    pub fn_: usize,
    pub tn: usize,
    pub fp: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fn_ + self.tn + self.fp
    }

    /// `TP / (TP + FN)`, undefined without positives.
    pub fn sensitivity(&self) -> Option<f64> {
        let pos = self.tp + self.fn_;
        (pos > 0).then(|| self.tp as f64 / pos as f64)
    }

    /// `TN / (TN + FP)`, undefined without negatives.
    pub fn specificity(&self) -> Option<f64> {
        let neg = self.tn + self.fp;
        (neg > 0).then(|| self.tn as f64 / neg as f64)
    }
}

/// Ground-truth labels (true = positive) for every bipartition of `n`,
/// in ascending-mask order.
pub fn truth_labels(truth_mu: &Partition) -> Result<Vec<bool>> {
    let negatives = entailed_dichotomies(truth_mu)?;
    Ok(enumerate_bipartitions(truth_mu.n())?
        .iter()
        .map(|b| negatives.binary_search(b).is_err())
        .collect())
}

pub fn confusion_from_rejections(truth_positive: &[bool], rejected: &[bool]) -> Result<Confusion> {
    if truth_positive.len() != rejected.len() {
        return Err(Error::DimensionMismatch {
            left: truth_positive.len(),
            right: rejected.len(),
        });
    }
    let mut c = Confusion::default();
    for (&pos, &rej) in truth_positive.iter().zip(rejected) {
        match (pos, rej) {
            (true, true) => c.tp += 1,
            (true, false) => c.fn_ += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fp += 1,
        }
    }
    Ok(c)
}

pub fn classify_against_truth(outcome: &InferenceOutcome, truth_mu: &Partition) -> Result<Confusion> {
    if outcome.n != truth_mu.n() {
        return Err(Error::DimensionMismatch {
            left: outcome.n,
            right: truth_mu.n(),
        });
    }
    confusion_from_rejections(&truth_labels(truth_mu)?, &outcome.rejected)
}
