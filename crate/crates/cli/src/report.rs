//! Rendering inference outcomes and campaign summaries.

use std::fmt::Write;

use mutindep::simulation::{CampaignSummary, Quartiles};
use mutindep::InferenceOutcome;
use serde_json::{json, Value};

/// Key-sorted JSON document for one inference.
pub fn outcome_json(out: &InferenceOutcome) -> Value {
    let tests: Vec<Value> = out
        .tests
        .iter()
        .map(|t| {
            json!({
                "bipartition": t.bipartition.to_string(),
                "statistic": t.statistic,
                "df": t.df,
                "p_value": t.p_value,
            })
        })
        .collect();
    json!({
        "n": out.n,
        "k": out.k,
        "alpha": out.alpha,
        "correction": out.correction,
        "mode": out.mode,
        "m": out.m,
        "m_thres": out.m_thres,
        "tests": tests,
        "delta_hat": out.delta_hat.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "mu_hat": out.mu_hat.to_string(),
    })
}

pub fn outcome_csv(out: &InferenceOutcome) -> String {
    let mut s = String::from("bipartition,df,statistic,p_value,rejected\n");
    for (t, rejected) in out.tests.iter().zip(&out.rejected) {
        writeln!(s, "{},{},{},{},{}", t.bipartition, t.df, t.statistic, t.p_value, u8::from(*rejected)).unwrap();
    }
    s
}

pub fn outcome_text(out: &InferenceOutcome) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "n = {}, k = {}, alpha = {}, correction = {}, mode = {}",
        out.n, out.k, out.alpha, out.correction, out.mode
    )
    .unwrap();
    writeln!(s, "{} tests, {} rejected", out.m, out.m_thres).unwrap();
    writeln!(s).unwrap();
    let width = out.tests.iter().map(|t| t.bipartition.to_string().len()).max().unwrap_or(0).max(11);
    writeln!(s, "{:<width$}  {:>4}  {:>12}  {:>12}", "bipartition", "df", "statistic", "p-value").unwrap();
    for (t, rejected) in out.tests.iter().zip(&out.rejected) {
        writeln!(
            s,
            "{:<width$}  {:>4}  {:>12.4}  {:>12.4e}{}",
            t.bipartition.to_string(),
            t.df,
            t.statistic,
            t.p_value,
            if *rejected { "" } else { "  kept" }
        )
        .unwrap();
    }
    writeln!(s).unwrap();
    s.push_str(&survivors_text(out));
    s
}

pub fn survivors_text(out: &InferenceOutcome) -> String {
    let delta: Vec<String> = out.delta_hat.iter().map(ToString::to_string).collect();
    let shown = if delta.is_empty() { "(none)".to_string() } else { delta.join(", ") };
    format!("delta_hat: {shown}\nmu_hat: {}\n", out.mu_hat)
}

fn median(q: &Option<Quartiles>) -> String {
    q.as_ref().map_or_else(|| "NA".to_string(), |q| format!("{:.3}", q.median))
}

pub fn summary_table(summary: &CampaignSummary) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "{:>2} {:>6} {:>5} {:>6} {:>8} {:>8} {:>8} {:>8}",
        "K", "size", "runs", "failed", "sens", "spec", "auc", "correct"
    )
    .unwrap();
    for c in &summary.cells {
        writeln!(
            s,
            "{:>2} {:>6} {:>5} {:>6} {:>8} {:>8} {:>8} {:>8}",
            c.blocks,
            c.subset_size,
            c.runs,
            c.failed,
            median(&c.sensitivity),
            median(&c.specificity),
            median(&c.auc),
            c.correct_ratio.map_or_else(|| "NA".to_string(), |r| format!("{r:.3}")),
        )
        .unwrap();
    }
    writeln!(
        s,
        "{} runs, {} failed analyses (medians shown)",
        summary.total_runs, summary.failed_analyses
    )
    .unwrap();
    s
}
