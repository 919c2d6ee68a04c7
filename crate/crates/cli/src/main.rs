//! `vwp`: Bayesian treatment-effect inference for high-dimensional logistic
//! regression from the command line.
//!
//! Subcommands:
//! - `simulate`: Monte Carlo coverage study from a JSON config;
//! - `fit`: run the Gibbs chain on one CSV dataset;
//! - `summarize`: credible-interval summary of a saved draws file.

mod config;
mod ingest;
mod report;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use thiserror::Error;

use vwp_core::gibbs::{run_chain, ChainConfig, GibbsError};
use vwp_core::inference::{summarize, summarize_slice, InferenceError};
use vwp_core::model::{derive_spike_slab, ModelError, ThetaPrior};
use vwp_core::simharness::{run_mc, HarnessError};

use config::{OutputFormat, SimulateConfig};
use report::{FitRecord, Manifest};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at row {row}, column '{column}': {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },
    #[error("outcome is not binary at row {row}: '{value}'")]
    NonBinaryOutcome { row: usize, value: String },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Gibbs(#[from] GibbsError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

#[derive(Parser)]
#[command(name = "vwp", version, about = "Valid Bayesian inference for treatment effects in high-dimensional logistic regression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo coverage study described by a JSON config.
    Simulate(SimulateArgs),
    /// Fit the model to one CSV dataset and report a credible interval.
    Fit(FitArgs),
    /// Summarize a saved draws file.
    Summarize(SummarizeArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// JSON config with sections dgp, chain, priors, methods, output.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if absent).
    #[arg(long)]
    out: PathBuf,
    /// Override the replication count from the config.
    #[arg(long)]
    reps: Option<usize>,
    /// Override both the DGP and chain seeds.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallel replications (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    data: PathBuf,
    /// Treatment column name (binary or small-integer categorical).
    #[arg(long)]
    treatment: String,
    /// Binary outcome column name.
    #[arg(long)]
    outcome: String,
    /// Comma-separated names of categorical nuisance columns.
    #[arg(long, value_delimiter = ',')]
    categorical: Vec<String>,
    /// Two-sided tail mass of the credible interval.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Optional output directory for draws, fit record, and manifest.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 6000)]
    iterations: usize,
    #[arg(long, default_value_t = 1000)]
    burn_in: usize,
    #[arg(long, default_value_t = 1)]
    thin: usize,
    /// Gaussian prior variance of the treatment effect.
    #[arg(long, default_value_t = 10.0)]
    lambda: f64,
}

#[derive(Args)]
struct SummarizeArgs {
    /// Draws file written by `fit`.
    #[arg(long)]
    draws: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Fit(args) => fit(args),
        Command::Summarize(args) => summarize_cmd(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    if let Some(jobs) = args.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let mut cfg = SimulateConfig::from_path(&args.config)?;
    if let Some(reps) = args.reps {
        cfg.dgp.reps = reps;
    }
    if let Some(seed) = args.seed {
        cfg.dgp.seed = seed;
        cfg.chain.seed = seed;
    }
    std::fs::create_dir_all(&args.out)?;
    let cells = cfg.dgp_cells();
    let tp = ThetaPrior::new(cfg.priors.lambda)?;
    let report = run_mc(&cells, &cfg.methods, cfg.dgp.reps, &cfg.chain, &tp, 0.05)?;

    let mut written = Vec::new();
    if matches!(cfg.output.format, OutputFormat::Csv | OutputFormat::Both) {
        let path = args.out.join("report.csv");
        report::write_mc_csv(&report, &path)?;
        written.push(path);
    }
    if matches!(cfg.output.format, OutputFormat::Jsonl | OutputFormat::Both) {
        let path = args.out.join("report.jsonl");
        report::write_mc_jsonl(&report, &path)?;
        written.push(path);
    }
    report::write_manifest(
        &args.out,
        &Manifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: "simulate".to_string(),
            seed: cfg.dgp.seed,
            config_digest: cfg.digest(),
        },
    )?;
    for row in &report.rows {
        println!(
            "{:>7}  theta0={:<4} coverage={:.3} length={:.3} bias={:.3} reps={} failures={}",
            row.method.to_string(),
            row.theta0,
            row.coverage,
            row.length,
            row.bias,
            row.reps,
            row.failures
        );
    }
    for path in written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn fit(args: FitArgs) -> Result<(), CliError> {
    let (data, ingest_report) =
        ingest::ingest_csv(&args.data, &args.treatment, &args.outcome, &args.categorical)?;
    for w in &ingest_report.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!(
        "ingested n={} rows, d={} nuisance columns ({} rows dropped)",
        data.n(),
        data.d(),
        ingest_report.rows_dropped
    );
    let ss = derive_spike_slab(data.n(), data.d().max(1));
    let tp = ThetaPrior::new(args.lambda)?;
    let chain = ChainConfig {
        iterations: args.iterations,
        burn_in: args.burn_in,
        thin: args.thin,
        seed: args.seed,
        stream_id: 0,
    };
    let draws = run_chain(&data, &ss, &tp, &chain)?;
    let intervals = summarize(&draws, args.alpha)?;
    let records: Vec<FitRecord> = intervals
        .iter()
        .enumerate()
        .map(|(j, iv)| FitRecord::new(j, iv))
        .collect();
    for r in &records {
        println!(
            "theta[{}]: point={:.4} se={:.4} {:.0}% interval=({:.4}, {:.4})",
            r.component,
            r.point,
            r.se,
            100.0 * r.level,
            r.lower,
            r.upper
        );
    }
    if let Some(out) = args.out {
        std::fs::create_dir_all(&out)?;
        let k = draws.num_components();
        for j in 0..k {
            let col: Vec<f64> = draws.component(j).to_vec();
            let name = if k == 1 {
                "draws.bin".to_string()
            } else {
                format!("draws_{j}.bin")
            };
            report::write_draws(&out.join(name), &col)?;
        }
        std::fs::write(out.join("fit.json"), serde_json::to_string_pretty(&records)?)?;
        report::write_manifest(
            &out,
            &Manifest {
                version: env!("CARGO_PKG_VERSION").to_string(),
                command: "fit".to_string(),
                seed: args.seed,
                config_digest: draws.meta.config_digest.clone(),
            },
        )?;
        eprintln!("wrote outputs to {}", out.display());
    }
    Ok(())
}

fn summarize_cmd(args: SummarizeArgs) -> Result<(), CliError> {
    let draws = report::read_draws(&args.draws)?;
    let iv = summarize_slice(&draws, args.alpha)?;
    println!(
        "theta: point={:.4} se={:.4} {:.0}% interval=({:.4}, {:.4})  [{} draws]",
        iv.point,
        iv.se,
        100.0 * iv.level,
        iv.lower,
        iv.upper,
        draws.len()
    );
    Ok(())
}
