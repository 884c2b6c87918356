//! `cxrlabel`: run the report-mining pipeline from a config file.
//!
//! Each subcommand reads its inputs from the run configuration (see
//! [`config`]), writes its artifacts atomically into the output directory
//! and finishes with a `<subcommand>.manifest.json` holding input digests,
//! the seed, the tool version and timings.
//!
//! Exit status: 0 on success, 2 for a missing input, 3 for an input that
//! fails validation, 4 for an internal consistency failure, 1 otherwise.

pub mod artifact;
mod commands;
pub mod config;
pub mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cxrlabel_core::labels::Policy;
use cxrlabel_service::QueueCoverage;

pub use commands::service_app;
use config::{RunConfig, ThresholdReference, DATA_DIR_ENV, DEFAULT_CONFIG_NAME};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "cxrlabel", version, about = "Mine chest X-ray reports into labeled training sets")]
pub struct Cli {
    /// Run configuration file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base directory for relative paths when no config file is given; a
    /// `cxrlabel.toml` found here is used as the config.
    #[arg(long, global = true, env = DATA_DIR_ENV)]
    pub data_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub policy: Option<Policy>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub inputs: InputArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Input paths overriding the config file, relative to the working
/// directory.
#[derive(Debug, Default, clap::Args)]
pub struct InputArgs {
    #[arg(long, global = true)]
    pub reports: Option<PathBuf>,
    #[arg(long, global = true)]
    pub splitter: Option<PathBuf>,
    #[arg(long, global = true)]
    pub rules: Option<PathBuf>,
    #[arg(long, global = true)]
    pub ontology: Option<PathBuf>,
    #[arg(long, global = true)]
    pub tags: Option<PathBuf>,
    #[arg(long, global = true)]
    pub pool: Option<PathBuf>,
    #[arg(long, global = true)]
    pub ratings: Option<PathBuf>,
    #[arg(long, global = true)]
    pub predictions: Option<PathBuf>,
    #[arg(long, global = true)]
    pub labels: Option<PathBuf>,
    #[arg(long, global = true)]
    pub eval_sets: Option<PathBuf>,
    #[arg(long, global = true)]
    pub event_log: Option<PathBuf>,
    #[arg(long, global = true)]
    pub image_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load and validate the reports; write ingest_summary.json.
    Ingest,
    /// Build the ranked sentence pool; write pool.csv.
    Pool,
    /// Tagging coverage curve; write coverage.csv.
    Coverage,
    /// Classify every report; write analyses.csv.
    Classify,
    /// Labeled studies, patient partition and subsets; write
    /// labels_<policy>.csv and subsets_<policy>.json.
    BuildLabels,
    /// Agreement statistics on rated evaluation sets; write eval_report.csv
    /// and, given labels, auc.csv.
    Eval {
        #[arg(long, value_enum)]
        threshold_reference: Option<ThresholdReference>,
    },
    /// Label-noise estimate for both policies; write noise_report.csv.
    Noise,
    /// Run the annotation service.
    Serve {
        #[arg(long)]
        addr: Option<String>,
        #[arg(long)]
        queue_coverage: Option<QueueCoverage>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest => "ingest",
            Command::Pool => "pool",
            Command::Coverage => "coverage",
            Command::Classify => "classify",
            Command::BuildLabels => "build-labels",
            Command::Eval { .. } => "eval",
            Command::Noise => "noise",
            Command::Serve { .. } => "serve",
        }
    }
}

fn absolute(p: &Path) -> PathBuf {
    std::env::current_dir().map(|cwd| cwd.join(p)).unwrap_or_else(|_| p.to_path_buf())
}

/// The effective configuration: file (or defaults), then flag overrides.
pub fn effective_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let data_dir = cli.data_dir.as_deref().map(absolute);
    let file = cli
        .config
        .clone()
        .or_else(|| data_dir.as_ref().map(|d| d.join(DEFAULT_CONFIG_NAME)).filter(|p| p.is_file()));
    let mut config = match file {
        Some(path) => RunConfig::load(&absolute(&path)).map_err(|e| match e {
            config::ConfigError::Read(p, io) => CliError::from_io(&p, io),
            invalid => CliError::Validation(invalid.to_string()),
        })?,
        None => {
            let mut c = RunConfig::default();
            c.resolve(&data_dir.unwrap_or_else(|| absolute(Path::new("."))));
            c
        }
    };

    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(policy) = cli.policy {
        config.policy = policy;
    }
    if let Some(out) = &cli.out {
        config.out_dir = absolute(out);
    }
    let a = &cli.inputs;
    let i = &mut config.inputs;
    for (flag, slot) in [
        (&a.reports, &mut i.reports),
        (&a.splitter, &mut i.splitter),
        (&a.rules, &mut i.rules),
        (&a.ontology, &mut i.ontology),
        (&a.tags, &mut i.tags),
        (&a.pool, &mut i.pool),
        (&a.ratings, &mut i.ratings),
        (&a.predictions, &mut i.predictions),
        (&a.labels, &mut i.labels),
        (&a.eval_sets, &mut i.eval_sets),
        (&a.event_log, &mut i.event_log),
        (&a.image_dir, &mut i.image_dir),
    ] {
        if let Some(p) = flag {
            *slot = Some(absolute(p));
        }
    }
    match &cli.command {
        Command::Eval { threshold_reference: Some(r) } => config.eval.threshold_reference = *r,
        Command::Serve { addr, queue_coverage } => {
            if let Some(addr) = addr {
                config.serve.addr = addr.clone();
            }
            if let Some(q) = queue_coverage {
                config.serve.queue_coverage = *q;
            }
        }
        _ => {}
    }
    config.validate().map_err(CliError::Validation)?;
    Ok(config)
}

/// Run one subcommand to completion.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let config = effective_config(cli)?;
    let run = match cli.command {
        Command::Ingest => commands::ingest(&config)?,
        Command::Pool => commands::pool(&config)?,
        Command::Coverage => commands::coverage(&config)?,
        Command::Classify => commands::classify(&config)?,
        Command::BuildLabels => commands::build_labels(&config)?,
        Command::Eval { .. } => commands::eval(&config)?,
        Command::Noise => commands::noise(&config)?,
        Command::Serve { .. } => return commands::serve(&config),
    };
    let manifest = run.finish()?;
    tracing::info!(manifest = %manifest.display(), "run complete");
    Ok(())
}

/// Parse arguments, run, and map the outcome to an exit status.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    let _ = tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_env("CXRLABEL_LOG")
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .try_init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}: {e}", cli.command.name());
            ExitCode::from(&e)
        }
    }
}
