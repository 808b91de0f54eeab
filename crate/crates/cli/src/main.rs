//! `graphftrl` command-line front end.
//!
//! Exit codes: 0 success, 2 unparseable input, 3 policy/graph
//! incompatibility, 4 runtime failure.

mod commands;
mod export;
mod graph_info;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use graphftrl::harness::TraceDetail;
use graphftrl::Error;

#[derive(Debug, Parser)]
#[command(name = "graphftrl", version, about = "Best-of-both-worlds FTRL on feedback graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct ConfigArgs {
    /// JSON config with graph/policy/environment/run sections.
    #[arg(long)]
    config: PathBuf,
    /// Override a config value, e.g. `--set run.horizon=5000`.
    #[arg(long = "set", value_name = "PATH=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TraceArg {
    None,
    Summary,
    Full,
}

impl From<TraceArg> for TraceDetail {
    fn from(t: TraceArg) -> Self {
        match t {
            TraceArg::None => TraceDetail::None,
            TraceArg::Summary => TraceDetail::Summary,
            TraceArg::Full => TraceDetail::Full,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExportFormat {
    /// Per-config mean and standard error of the final regret.
    Csv,
    /// A standalone Python/matplotlib script plotting regret against T.
    PlotScript,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report observability, independence number and dominating sets.
    GraphInfo {
        /// Catalog spec such as `bandit:4` or a JSON graph file.
        spec: String,
        /// Name the compatible policy; exits 3 for unobservable graphs.
        #[arg(long)]
        infer_policy: bool,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every seed of a config.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        /// Run this single seed instead of the configured list.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, value_enum)]
        trace: Option<TraceArg>,
    },
    /// Run the cross product of the config's sweep grid and seeds.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Parse and resolve a config, printing the resolved parameters.
    Validate {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Turn a results table into an aggregate CSV or a plot script.
    Export {
        /// `results.csv` written by `run` or `sweep`.
        #[arg(long)]
        results: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
        #[arg(long)]
        out: PathBuf,
    },
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn parse(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: 2,
            error: error.into(),
        }
    }

    pub fn runtime(error: impl Into<anyhow::Error>) -> Self {
        Self {
            code: 4,
            error: error.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::GraphParse(_) | Error::Config(_) | Error::BadParameter(_) => 2,
            Error::PolicyGraphMismatch { .. }
            | Error::Unobservable
            | Error::NotStronglyObservable
            | Error::NotWeaklyObservable
            | Error::EmptyV2
            | Error::InvalidDominatingSet(_)
            | Error::UncoverableTarget(_) => 3,
            _ => 4,
        };
        Self {
            code,
            error: e.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Self { code: 4, error }
    }
}

pub type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GraphInfo {
            spec,
            infer_policy,
            out,
        } => graph_info::run(&spec, infer_policy, out.as_deref()),
        Command::Run {
            config,
            seed,
            jobs,
            out,
            trace,
        } => commands::run(
            &config.config,
            &config.overrides,
            seed,
            jobs,
            &out,
            trace.map(Into::into),
        ),
        Command::Sweep { config, jobs, out } => {
            commands::sweep(&config.config, &config.overrides, jobs, &out)
        }
        Command::Validate { config } => commands::validate(&config.config, &config.overrides),
        Command::Export {
            results,
            format,
            out,
        } => match format {
            ExportFormat::Csv => export::csv(&results, &out),
            ExportFormat::PlotScript => export::plot_script(&results, &out),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
