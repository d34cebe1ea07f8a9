//! `mutindep` command-line tool.
//!
//! Exit codes: 0 on success, 1 on an internal numerical failure, 2 on a
//! problem with the user's input (including malformed arguments).

mod input;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mutindep::inference::{infer_from_data, infer_from_model, InferenceSettings};
use mutindep::lattice::{entailed_dichotomies, meet_all};
use mutindep::simulation::{campaign_csv, run_campaign, summarize, SimulationConfig};
use mutindep::{datasets, Correction, Error, Partition, TestMode};

#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: u8,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { message: message.into(), code: 2 }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        CliError { message: message.into(), code: 1 }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            CliError::input(e.to_string())
        } else {
            CliError::internal(e.to_string())
        }
    }
}

#[derive(Parser)]
#[command(name = "mutindep", version, about = "Infer the finest mutual-independence pattern of Gaussian variables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test every bipartition of a dataset and report the estimated pattern.
    Infer(InferArgs),
    /// List the bipartitions entailed by a partition.
    Dichotomies {
        /// Partition such as "12|3|4" or "1,2,10|3".
        partition: String,
    },
    /// Print the meet (common refinement) of one or more partitions.
    Meet {
        #[arg(required = true)]
        partitions: Vec<String>,
    },
    /// Run a seeded simulation campaign.
    Simulate(SimulateArgs),
    /// Reproduce the HIV study analysis from the embedded correlations.
    Hiv {
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct TestOptions {
    /// Significance level of the multiple-testing correction.
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// fdr (Benjamini-Hochberg) or bonferroni.
    #[arg(long, default_value = "fdr")]
    correction: Correction,
    /// Reference distribution: central or noncentral chi-squared.
    #[arg(long, default_value = "central")]
    mode: TestMode,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct InferArgs {
    /// CSV of observations: one row per sample, one column per variable.
    #[arg(required_unless_present = "correlation", conflicts_with = "correlation")]
    input: Option<PathBuf>,
    /// Correlation matrix file (square or lower triangle) instead of raw data.
    #[arg(long, requires = "samples")]
    correlation: Option<PathBuf>,
    /// Number of samples behind --correlation.
    #[arg(long, requires = "correlation")]
    samples: Option<usize>,
    #[command(flatten)]
    test: TestOptions,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON campaign configuration; excludes the design flags below.
    #[arg(long, conflicts_with_all = ["n", "blocks", "runs", "samples", "sizes", "alpha", "correction", "mode"])]
    config: Option<PathBuf>,
    /// Number of variables.
    #[arg(long)]
    n: Option<usize>,
    /// Block counts, as a range "1..6" or a list "2,4".
    #[arg(long)]
    blocks: Option<String>,
    /// Runs per block count.
    #[arg(long)]
    runs: Option<usize>,
    /// Samples drawn per run.
    #[arg(long)]
    samples: Option<usize>,
    /// Subset sizes, as "start:end:step" or a list "50,100".
    #[arg(long)]
    sizes: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    correction: Option<Correction>,
    #[arg(long)]
    mode: Option<TestMode>,
    /// Master seed (default 1); overrides the seed of a --config file.
    #[arg(long, env = "MUTINDEP_SEED")]
    seed: Option<u64>,
    /// Directory receiving campaign.csv and summary.json.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
}

fn set_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::input("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::internal(e.to_string()))?;
    }
    Ok(())
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_partition(text: &str) -> Result<Partition, CliError> {
    Ok(text.parse::<Partition>()?)
}

fn infer(args: InferArgs) -> Result<(), CliError> {
    set_threads(args.test.threads)?;
    let settings = InferenceSettings {
        alpha: args.test.alpha,
        correction: args.test.correction,
        mode: args.test.mode,
    };
    let outcome = match (&args.input, &args.correlation, args.samples) {
        (Some(path), _, _) => infer_from_data(&input::read_data_csv(path)?, settings)?,
        (None, Some(path), Some(k)) => infer_from_model(&input::read_correlation(path, k)?, settings)?,
        _ => return Err(CliError::input("give a data CSV or --correlation with --samples")),
    };
    let text = match args.format {
        Format::Json => format!("{:#}\n", report::outcome_json(&outcome)),
        Format::Csv => report::outcome_csv(&outcome),
        Format::Text => report::outcome_text(&outcome),
    };
    write_output(args.output.as_deref(), &text)
}

/// Prints the entailed bipartitions in lexicographic order of their
/// canonical strings.
fn dichotomies(partition: &str) -> Result<(), CliError> {
    let mut lines: Vec<String> = entailed_dichotomies(&parse_partition(partition)?)?
        .iter()
        .map(ToString::to_string)
        .collect();
    lines.sort();
    for line in lines {
        println!("{line}");
    }
    Ok(())
}

fn meet(partitions: &[String]) -> Result<(), CliError> {
    let parsed = partitions.iter().map(|p| parse_partition(p)).collect::<Result<Vec<_>, _>>()?;
    println!("{}", meet_all(&parsed)?);
    Ok(())
}

fn parse_list(text: &str, what: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::input(format!("cannot parse {what} {text:?}"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    if let Some((lo, hi)) = text.split_once("..") {
        let (lo, hi) = (num(lo)?, num(hi.trim_start_matches('='))?);
        return if lo <= hi { Ok((lo..=hi).collect()) } else { Err(bad()) };
    }
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let (lo, hi, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if step == 0 || lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).step_by(step).collect());
    }
    text.split(',').map(num).collect()
}

fn simulation_config(args: &SimulateArgs) -> Result<SimulationConfig, CliError> {
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        let mut c: SimulationConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("{}: invalid configuration: {e}", path.display())))?;
        if let Some(seed) = args.seed {
            c.master_seed = seed;
        }
        return Ok(c);
    }
    let mut c = SimulationConfig::full_scale(args.seed.unwrap_or(1));
    if let Some(n) = args.n {
        c.n = n;
        c.block_counts = (1..=n).collect();
    }
    if let Some(b) = &args.blocks {
        c.block_counts = parse_list(b, "block counts")?;
    }
    if let Some(r) = args.runs {
        c.runs_per_k = r;
    }
    if let Some(s) = &args.sizes {
        c.subset_sizes = parse_list(s, "subset sizes")?;
    }
    c.max_samples = args.samples.unwrap_or_else(|| c.subset_sizes.iter().copied().max().unwrap_or(0));
    if let Some(a) = args.alpha {
        c.alpha = a;
    }
    if let Some(m) = args.correction {
        c.correction = m;
    }
    if let Some(m) = args.mode {
        c.mode = m;
    }
    Ok(c)
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    set_threads(args.threads)?;
    let config = simulation_config(&args)?;
    config.validate()?;
    let records = run_campaign(&config)?;
    let summary = summarize(&config, &records);

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::input(format!("cannot create {}: {e}", args.out_dir.display())))?;
    let csv_path = args.out_dir.join("campaign.csv");
    let json_path = args.out_dir.join("summary.json");
    write_output(Some(&csv_path), &campaign_csv(&records))?;
    let json = serde_json::to_string_pretty(&summary).map_err(|e| CliError::internal(e.to_string()))?;
    write_output(Some(&json_path), &(json + "\n"))?;

    print!("{}", report::summary_table(&summary));
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    let analyses = records.len() * config.subset_sizes.len();
    if summary.failed_analyses == analyses {
        return Err(CliError::internal("every analysis in the campaign failed"));
    }
    Ok(())
}

fn hiv(alpha: f64) -> Result<(), CliError> {
    let settings = InferenceSettings { alpha, ..InferenceSettings::default() };
    let out = infer_from_model(&datasets::hiv_model(), settings)?;
    let mut tests: Vec<_> = out.tests.iter().zip(&out.rejected).collect();
    tests.sort_by(|a, b| b.0.p_value.total_cmp(&a.0.p_value));
    println!("HIV study: n = {}, k = {}, alpha = {}", out.n, out.k, out.alpha);
    for (t, rejected) in &tests {
        println!("{:<8} {:>11.4e}{}", t.bipartition.to_string(), t.p_value, if **rejected { "" } else { "  kept" });
    }
    print!("{}", report::survivors_text(&out));
    let top = tests[0].0.bipartition.to_string();
    if top != "12356|4" {
        return Err(CliError::internal(format!("expected 12356|4 as the top pattern, found {top}")));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Infer(args) => infer(args),
        Command::Dichotomies { partition } => dichotomies(&partition),
        Command::Meet { partitions } => meet(&partitions),
        Command::Simulate(args) => simulate(args),
        Command::Hiv { alpha } => hiv(alpha),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_syntax() {
        assert_eq!(parse_list("1..6", "x").unwrap(), vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(parse_list("50:300:50", "x").unwrap(), vec![50, 100, 150, 200, 250, 300]);
        assert_eq!(parse_list("2, 4", "x").unwrap(), vec![2, 4]);
        assert!(parse_list("6..1", "x").is_err());
        assert!(parse_list("1:5:0", "x").is_err());
        assert!(parse_list("a", "x").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
