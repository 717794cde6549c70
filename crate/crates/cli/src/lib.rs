// SPDX-License-Identifier: Apache-2.0

//! Command-line front end: reads a TOML experiment file, applies flag
//! overrides and writes CSV/JSON artifacts for each experiment.

// NaN-rejecting `!(x > 0.0)` guards are intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod selftest;

#[cfg(test)]
mod tests;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use sechgate::{Method, Shape};

pub use commands::{run_command, Command, Outcome};
pub use config::{ConfigFile, ExperimentConfig, Overrides};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "sechgate",
    version,
    about = "Simulate sech-pulse phase gates on a transmon"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Excited-state probability over amplitude and detuning.
    RabiScan,
    /// Columns of the Rabi map at the configured detunings.
    LineCuts,
    /// First-flop amplitude per detuning and its variation.
    CyclicAmplitude,
    /// Gate phase and polar angle against detuning.
    PhaseCurve,
    /// Six-state average gate fidelity against detuning.
    FidelitySweep,
    /// Samples of the configured gate pulse.
    WaveformDump,
    /// Simulation-versus-closed-form checks.
    Selftest,
}

impl From<&CliCommand> for Command {
    fn from(c: &CliCommand) -> Self {
        match c {
            CliCommand::RabiScan => Command::RabiScan,
            CliCommand::LineCuts => Command::LineCuts,
            CliCommand::CyclicAmplitude => Command::CyclicAmplitude,
            CliCommand::PhaseCurve => Command::PhaseCurve,
            CliCommand::FidelitySweep => Command::FidelitySweep,
            CliCommand::WaveformDump => Command::WaveformDump,
            CliCommand::Selftest => Command::Selftest,
        }
    }
}

#[derive(Debug, Args, Default)]
pub struct Flags {
    /// TOML experiment file; built-in defaults are used when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (output.dir).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Pulse shape: sech, gaussian or square (pulse.shape).
    #[arg(long, global = true)]
    pub shape: Option<Shape>,
    /// DAC resolution in bits, 0 for none (pulse.bit_depth).
    #[arg(long, global = true)]
    pub bit_depth: Option<u32>,
    /// Number of transmon levels (model.levels).
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    /// Half-width of the pulse window in units of sigma (pulse.window_sigmas).
    #[arg(long, global = true)]
    pub window_sigmas: Option<f64>,
    /// piecewise-exponential or adaptive-rk (evolution.method).
    #[arg(long, global = true)]
    pub method: Option<Method>,
    /// Worker threads, 0 for all cores (output.parallelism).
    #[arg(long, global = true)]
    pub parallelism: Option<usize>,
}

impl Flags {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            out: self.out.clone(),
            shape: self.shape,
            bit_depth: self.bit_depth,
            levels: self.levels,
            window_sigmas: self.window_sigmas,
            method: self.method,
            parallelism: self.parallelism,
        }
    }
}

/// Loads the file (or defaults), applies the flags and resolves units.
pub fn load_config(flags: &Flags) -> Result<ExperimentConfig, CliError> {
    let mut file = match &flags.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    file.apply(&flags.overrides());
    file.resolve()
}

/// Runs a parsed command line inside a pool of the configured size.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = load_config(&cli.flags)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_command(Command::from(&cli.command), &cfg))
}

/// Parses arguments, runs the subcommand and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            for line in &outcome.details {
                println!("{line}");
            }
            println!("{}", outcome.summary);
            if outcome.failed_checks > 0 {
                let err = CliError::SelfTest(outcome.failed_checks);
                eprintln!("error: {err}");
                return err.exit_code();
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
