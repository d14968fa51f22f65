//! `h4`: derive, cache, verify and export the H4 artifacts.

mod cache;
mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use h4_core::pipeline::{CacheOutcome, Pipeline};

use crate::cache::DiskStore;
use crate::commands::DeriveKind;
use crate::config::{Format, Param, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "h4", version, about = "Exact derivations and checks for the rational H4 model in invariant coordinates")]
struct Cli {
    /// coupling ν as P/Q, or `symbolic`
    #[arg(long, global = true, default_value = "1/3")]
    nu: Param,
    /// frequency ω as P/Q, or `symbolic`
    #[arg(long, global = true, default_value = "1")]
    omega: Param,
    /// flag level n (spectrum: 12, eigenfunctions: 6)
    #[arg(long, global = true)]
    level: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// directory for cached artifacts
    #[arg(long, global = true, default_value = ".h4-cache")]
    cache: PathBuf,
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Group order and the four fundamental-weight orbit lengths
    Group {
        /// perturb one root before generating (exercises the failure path)
        #[arg(long, hide = true)]
        corrupt_root: bool,
    },
    /// Invariance and degrees of the printed and relabelled τ's
    Tau,
    /// Derived coefficients against the reference values
    Derive {
        #[arg(value_enum)]
        kind: DeriveKind,
    },
    /// Levels of h on the (1,6,10,15) flag with degeneracies
    Spectrum,
    /// Printed eigenfunction checks and solver eigenvectors
    Eigenfunctions,
    /// Jacobian factor and boundary-surface proportionality
    Boundary,
    /// Every acceptance criterion in order
    VerifyAll,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Format as clap::ValueEnum>::from_str(s, true)
    }
}

fn run(cli: Cli) -> Result<report::Report, CliError> {
    let default_level = match cli.command {
        Command::Eigenfunctions => 6,
        _ => 12,
    };
    let cfg = RunConfig {
        nu: cli.nu,
        omega: cli.omega,
        level: cli.level.unwrap_or(default_level),
        format: cli.format,
        cache: (!cli.no_cache).then_some(cli.cache),
    }
    .validate()?;
    let mut pipeline = Pipeline::embedded()?;
    if let Some(dir) = &cfg.cache {
        pipeline = pipeline.with_store(Box::new(DiskStore::new(dir.clone())));
    }
    let result = match cli.command {
        Command::Group { corrupt_root } => commands::group(&pipeline, &cfg, corrupt_root),
        Command::Tau => commands::tau_report(&pipeline, &cfg),
        Command::Derive { kind } => commands::derive(&pipeline, &cfg, kind),
        Command::Spectrum => commands::spectrum(&pipeline, &cfg),
        Command::Eigenfunctions => commands::eigenfunctions(&pipeline, &cfg),
        Command::Boundary => commands::boundary(&pipeline, &cfg),
        Command::VerifyAll => commands::verify_all(&pipeline, &cfg),
    };
    for e in pipeline.cache_events() {
        match e.outcome {
            CacheOutcome::Hit => eprintln!("cache {}: hit", e.kind),
            CacheOutcome::Miss => eprintln!("cache {}: miss", e.kind),
            CacheOutcome::Rejected(why) => eprintln!("cache {}: rejected ({why})", e.kind),
        }
    }
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    let streamed = matches!(cli.command, Command::VerifyAll) && format == Format::Text;
    match run(cli) {
        Ok(report) => {
            if streamed {
                println!("match={}", report.matched);
            } else {
                print!("{}", report.render(format));
            }
            if report.matched {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
