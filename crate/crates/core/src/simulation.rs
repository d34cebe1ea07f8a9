//! Monte Carlo study of the inference procedure on random block-structured
//! Gaussian models.
//!
//! For every block count `K`, each run draws a uniform `K`-block partition
//! of the variables, gives each block a Wishart-rescaled correlation matrix
//! (independent across blocks), samples `max_samples` rows, and analyses the
//! leading `s` rows for every subset size `s`. Runs own private RNG streams
//! keyed by `(master_seed, run id)`, so results do not depend on scheduling.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correction::Correction;
use crate::error::{Error, Result};
use crate::inference::{
    confusion_from_rejections, infer_from_data, truth_labels, Confusion, InferenceSettings,
};
use crate::lattice::{entailed_dichotomies, Partition};
use crate::mdi::TestMode;
use crate::numstats::{
    random_partition_with_k_blocks, sample_mvn, sample_wishart_correlation, Matrix, RngStream,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub n: usize,
    pub block_counts: Vec<usize>,
    pub runs_per_k: usize,
    pub max_samples: usize,
    pub subset_sizes: Vec<usize>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub correction: Correction,
    #[serde(default)]
    pub mode: TestMode,
    #[serde(default)]
    pub master_seed: u64,
}

fn default_alpha() -> f64 {
    0.1
}

impl SimulationConfig {
    /// Six variables, K = 1..6, 500 runs each, subsets 50..300 by 50,
    /// α = 0.1.
    pub fn full_scale(master_seed: u64) -> Self {
        SimulationConfig {
            n: 6,
            block_counts: (1..=6).collect(),
            runs_per_k: 500,
            max_samples: 300,
            subset_sizes: (1..=6).map(|i| 50 * i).collect(),
            alpha: 0.1,
            correction: Correction::Fdr,
            mode: TestMode::Central,
            master_seed,
        }
    }

    /// The full-scale design with fewer runs per block count.
    pub fn desk_scale(runs_per_k: usize, master_seed: u64) -> Self {
        SimulationConfig {
            runs_per_k,
            ..SimulationConfig::full_scale(master_seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &'static str, value: String, range: &'static str| {
            Err(Error::OutOfRange { what, value, range })
        };
        if !(2..=crate::lattice::MAX_BIPARTITION_N).contains(&self.n) {
            return bad("n", self.n.to_string(), "2..=32");
        }
        if self.block_counts.is_empty() {
            return Err(Error::Empty("block counts"));
        }
        if let Some(&k) = self.block_counts.iter().find(|&&k| k == 0 || k > self.n) {
            return bad("block count", k.to_string(), "1..=n");
        }
        if self.runs_per_k == 0 {
            return bad("runs per K", "0".into(), ">= 1");
        }
        if self.subset_sizes.is_empty() {
            return Err(Error::Empty("subset sizes"));
        }
        if let Some(&s) = self.subset_sizes.iter().find(|&&s| s < 3 || s > self.max_samples) {
            return bad("subset size", s.to_string(), "3..=max_samples");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("alpha", self.alpha.to_string(), "(0, 1)");
        }
        Ok(())
    }

    pub fn total_runs(&self) -> usize {
        self.block_counts.len() * self.runs_per_k
    }

    fn settings(&self) -> InferenceSettings {
        InferenceSettings {
            alpha: self.alpha,
            correction: self.correction,
            mode: self.mode,
        }
    }
}

/// Draws a uniform `blocks`-block partition and a block-diagonal
/// correlation matrix with Wishart-rescaled blocks.
pub fn generate_model(n: usize, blocks: usize, rng: &mut RngStream) -> Result<(Partition, Matrix)> {
    let truth = random_partition_with_k_blocks(n, blocks, rng)?;
    let mut sigma = Matrix::identity(n);
    for members in truth.blocks() {
        let block = sample_wishart_correlation(members.len(), rng);
        for (a, &i) in members.iter().enumerate() {
            for (b, &j) in members.iter().enumerate() {
                sigma[(i, j)] = block[(a, b)];
            }
        }
    }
    Ok((truth, sigma))
}

/// Probability that a random positive case has a smaller p-value than a
/// random negative case, ties counting one half. `None` unless both classes
/// are present.
pub fn auc(pvalues: &[f64], truth_positive: &[bool]) -> Option<f64> {
    debug_assert_eq!(pvalues.len(), truth_positive.len());
    // rank-sum form: sort once, assign mid-ranks to tied groups
    let mut idx: Vec<usize> = (0..pvalues.len()).collect();
    idx.sort_by(|&a, &b| pvalues[a].total_cmp(&pvalues[b]));
    let n_pos = truth_positive.iter().filter(|&&p| p).count();
    let n_neg = truth_positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    // count, for each positive, negatives with strictly larger p plus half
    // the tied negatives
    let mut favourable = 0.0;
    let mut start = 0;
    let mut neg_below = 0usize;
    while start < idx.len() {
        let mut end = start;
        while end < idx.len() && pvalues[idx[end]] == pvalues[idx[start]] {
            end += 1;
        }
        let group = &idx[start..end];
        let pos_here = group.iter().filter(|&&i| truth_positive[i]).count();
        let neg_here = group.len() - pos_here;
        let neg_above = n_neg - neg_below - neg_here;
        favourable += pos_here as f64 * (neg_above as f64 + 0.5 * neg_here as f64);
        neg_below += neg_here;
        start = end;
    }
    Some(favourable / (n_pos * n_neg) as f64)
}

/// Mean `|ρ_ij|` over pairs sharing a block of `truth`; `None` when every
/// block is a singleton.
pub fn within_block_correlation(truth: &Partition, sigma: &Matrix) -> Result<Option<f64>> {
    if truth.n() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            left: truth.n(),
            right: sigma.dim(),
        });
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for block in truth.blocks() {
        for (a, &i) in block.iter().enumerate() {
            for &j in &block[..a] {
                sum += sigma[(i, j)].abs();
                count += 1;
            }
        }
    }
    Ok((count > 0).then(|| sum / count as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubsetResult {
    pub size: usize,
    /// All p-values in ascending bipartition-mask order; empty on failure.
    pub pvalues: Vec<f64>,
    pub confusion: Option<Confusion>,
    pub auc: Option<f64>,
    pub correct: Option<bool>,
    pub failure: Option<String>,
}

impl SubsetResult {
    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }

    pub fn sensitivity(&self) -> Option<f64> {
        self.confusion.and_then(|c| c.sensitivity())
    }

    pub fn specificity(&self) -> Option<f64> {
        self.confusion.and_then(|c| c.specificity())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub run_id: u64,
    pub blocks: usize,
    pub truth: Partition,
    /// Block-diagonal ground-truth correlation, row-major.
    pub truth_correlation: Vec<f64>,
    pub within_block_correlation: Option<f64>,
    pub subsets: Vec<SubsetResult>,
}

fn simulate_run(config: &SimulationConfig, run_id: u64, blocks: usize) -> Result<RunRecord> {
    let mut rng = RngStream::new(config.master_seed, run_id);
    let (truth, sigma) = generate_model(config.n, blocks, &mut rng)?;
    let data = sample_mvn(&sigma, config.max_samples, &mut rng)?;
    let labels = truth_labels(&truth)?;
    let subsets = config
        .subset_sizes
        .iter()
        .map(|&size| {
            let analysed = data
                .prefix(size)
                .and_then(|d| infer_from_data(&d, config.settings()));
            match analysed {
                Ok(out) => {
                    let pvalues = out.p_values();
                    let confusion = confusion_from_rejections(&labels, &out.rejected).ok();
                    SubsetResult {
                        size,
                        auc: auc(&pvalues, &labels),
                        pvalues,
                        confusion,
                        correct: Some(out.mu_hat == truth),
                        failure: None,
                    }
                }
                Err(e) => SubsetResult {
                    size,
                    pvalues: Vec::new(),
                    confusion: None,
                    auc: None,
                    correct: None,
                    failure: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(RunRecord {
        run_id,
        blocks,
        within_block_correlation: within_block_correlation(&truth, &sigma)?,
        truth_correlation: sigma.as_slice().to_vec(),
        truth,
        subsets,
    })
}

/// Runs every (K, run) pair on the current rayon pool. Records come back in
/// run-id order.
pub fn run_campaign(config: &SimulationConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let jobs: Vec<(u64, usize)> = config
        .block_counts
        .iter()
        .enumerate()
        .flat_map(|(ki, &k)| {
            (0..config.runs_per_k).map(move |i| ((ki * config.runs_per_k + i) as u64, k))
        })
        .collect();
    jobs.par_iter()
        .map(|&(run_id, k)| simulate_run(config, run_id, k))
        .collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| x.to_string())
}

pub const CSV_HEADER: &str =
    "run_id,blocks,truth,subset_size,sensitivity,specificity,auc,correct,mean_abs_within_corr,failed";

/// One row per (run, subset size). Undefined metrics are written as `NA`.
pub fn campaign_csv(records: &[RunRecord]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let truth = r.truth.to_string();
        let truth = if truth.contains(',') {
            format!("\"{truth}\"")
        } else {
            truth
        };
        for s in &r.subsets {
            let correct = s.correct.map_or("NA", |c| if c { "1" } else { "0" });
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.run_id,
                r.blocks,
                truth,
                s.size,
                fmt_opt(s.sensitivity()),
                fmt_opt(s.specificity()),
                fmt_opt(s.auc),
                correct,
                fmt_opt(r.within_block_correlation),
                u8::from(s.failed()),
            );
        }
    }
    out
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Quartiles {
    pub count: usize,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

impl Quartiles {
    pub fn of(values: &[f64]) -> Option<Quartiles> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Some(Quartiles {
            count: v.len(),
            q1: quantile_sorted(&v, 0.25),
            median: quantile_sorted(&v, 0.5),
            q3: quantile_sorted(&v, 0.75),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSummary {
    pub blocks: usize,
    pub subset_size: usize,
    pub runs: usize,
    pub failed: usize,
    pub sensitivity: Option<Quartiles>,
    pub specificity: Option<Quartiles>,
    pub auc: Option<Quartiles>,
    pub correct_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorrelationBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    pub median_auc: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SizeBins {
    pub subset_size: usize,
    pub bins: Vec<CorrelationBin>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub config: SimulationConfig,
    pub total_runs: usize,
    pub failed_analyses: usize,
    pub cells: Vec<CellSummary>,
    /// AUC against mean within-block |ρ|, binned by deciles.
    pub auc_by_correlation: Vec<SizeBins>,
}

impl CampaignSummary {
    pub fn cell(&self, blocks: usize, subset_size: usize) -> Option<&CellSummary> {
        self.cells
            .iter()
            .find(|c| c.blocks == blocks && c.subset_size == subset_size)
    }
}

fn subsets_at(records: &[RunRecord], size: usize) -> impl Iterator<Item = (&RunRecord, &SubsetResult)> {
    records
        .iter()
        .filter_map(move |r| r.subsets.iter().find(|s| s.size == size).map(|s| (r, s)))
}

/// Fraction of non-failed runs whose estimate equals the truth.
pub fn correct_ratio(records: &[RunRecord], blocks: usize, size: usize) -> Option<f64> {
    let flags: Vec<bool> = subsets_at(records, size)
        .filter(|(r, _)| r.blocks == blocks)
        .filter_map(|(_, s)| s.correct)
        .collect();
    (!flags.is_empty()).then(|| flags.iter().filter(|&&c| c).count() as f64 / flags.len() as f64)
}

fn decile_bins(mut points: Vec<(f64, f64)>) -> Vec<CorrelationBin> {
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let n = points.len();
    let bins = 10.min(n);
    (0..bins)
        .map(|b| {
            let chunk = &points[b * n / bins..(b + 1) * n / bins];
            let aucs: Vec<f64> = chunk.iter().map(|p| p.1).collect();
            CorrelationBin {
                lower: chunk[0].0,
                upper: chunk[chunk.len() - 1].0,
                count: chunk.len(),
                median_auc: Quartiles::of(&aucs).map_or(f64::NAN, |q| q.median),
            }
        })
        .collect()
}

/// Excluding failed analyses, with the exclusion count reported per cell.
pub fn summarize(config: &SimulationConfig, records: &[RunRecord]) -> CampaignSummary {
    let mut cells = Vec::new();
    for &k in &config.block_counts {
        for &size in &config.subset_sizes {
            let here: Vec<&SubsetResult> = subsets_at(records, size)
                .filter(|(r, _)| r.blocks == k)
                .map(|(_, s)| s)
                .collect();
            let ok: Vec<&&SubsetResult> = here.iter().filter(|s| !s.failed()).collect();
            let collect = |f: &dyn Fn(&SubsetResult) -> Option<f64>| -> Vec<f64> {
                ok.iter().filter_map(|s| f(s)).collect()
            };
            cells.push(CellSummary {
                blocks: k,
                subset_size: size,
                runs: here.len(),
                failed: here.len() - ok.len(),
                sensitivity: Quartiles::of(&collect(&|s| s.sensitivity())),
                specificity: Quartiles::of(&collect(&|s| s.specificity())),
                auc: Quartiles::of(&collect(&|s| s.auc)),
                correct_ratio: correct_ratio(records, k, size),
            });
        }
    }
    let auc_by_correlation = config
        .subset_sizes
        .iter()
        .map(|&size| SizeBins {
            subset_size: size,
            bins: decile_bins(
                subsets_at(records, size)
                    .filter_map(|(r, s)| Some((r.within_block_correlation?, s.auc?)))
                    .collect(),
            ),
        })
        .collect();
    CampaignSummary {
        config: config.clone(),
        total_runs: records.len(),
        failed_analyses: records
            .iter()
            .flat_map(|r| &r.subsets)
            .filter(|s| s.failed())
            .count(),
        cells,
        auc_by_correlation,
    }
}

/// Number of bipartitions whose independence holds under `truth`.
pub fn truth_negative_count(truth: &Partition) -> Result<usize> {
    Ok(entailed_dichotomies(truth)?.len())
}
