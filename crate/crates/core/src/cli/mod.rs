//! Command-line front end.

pub mod commands;
pub mod config;
pub mod reproduce;
pub mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use commands::Outcome;
pub use config::{parse_config, ScenarioConfig};

use crate::error::{Error, Result};

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_SINGULAR: u8 = 3;
pub const EXIT_ACCEPTANCE: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "qchaos", version, about = "Complex-trajectory simulation, synchronization and chaos diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// Scenario file.
    pub config: PathBuf,
    /// Override a config key, e.g. `--set run.t_final=50`. Repeatable.
    #[arg(long = "set", short = 's', value_name = "SECTION.KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output directory (same as `--set output.dir=...`).
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print and save the derived model coefficients.
    Params(Common),
    /// Integrate the configured initial states.
    Simulate(Common),
    /// Synchronize each initial state to the configured master.
    Control(Common),
    /// Periodogram of the real x component.
    Spectrum(Common),
    /// Largest Lyapunov exponent of the real x component.
    Lle(Common),
    /// Total potential over the real plane.
    PotentialGrid(Common),
    /// Run the built-in scenario batch and grade it.
    Reproduce {
        /// Output directory.
        #[arg(long, short = 'o', default_value = "reproduce")]
        out: PathBuf,
    },
}

pub fn load(common: &Common) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| Error::ConfigSyntax(format!("cannot read {}: {e}", common.config.display())))?;
    let mut table = config::parse_document(&text)?;
    for o in &common.overrides {
        config::apply_override(&mut table, o)?;
    }
    if let Some(dir) = &common.out {
        config::apply_override(&mut table, &format!("output.dir=\"{}\"", dir.display().to_string().replace('\\', "/")))?;
    }
    config::from_table(&table)
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let with = |c: &Common, f: fn(&ScenarioConfig) -> Result<Outcome>| f(&load(c)?);
    match &cli.command {
        Command::Params(c) => with(c, commands::params),
        Command::Simulate(c) => with(c, commands::simulate),
        Command::Control(c) => with(c, commands::control),
        Command::Spectrum(c) => with(c, commands::spectrum),
        Command::Lle(c) => with(c, commands::lle),
        Command::PotentialGrid(c) => with(c, commands::potential_grid),
        Command::Reproduce { out } => reproduce::reproduce(out),
    }
}

pub fn exit_code(result: &Result<Outcome>) -> ExitCode {
    match result {
        Ok(o) if o.singular => ExitCode::from(EXIT_SINGULAR),
        Ok(o) if o.acceptance_failed => ExitCode::from(EXIT_ACCEPTANCE),
        Ok(_) => ExitCode::SUCCESS,
        Err(Error::Config { .. } | Error::ConfigSyntax(_)) => ExitCode::from(EXIT_CONFIG),
        Err(e) if e.is_singularity() => ExitCode::from(EXIT_SINGULAR),
        Err(_) => ExitCode::FAILURE,
    }
}
