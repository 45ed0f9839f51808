//! Configuration, subcommands and emitters behind the `decoherence` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use commands::{cmd_evolve, cmd_oracle, cmd_resonances, cmd_spinboson, cmd_sweep, cmd_xi, Output};
pub use config::{parse_config, Format, RunConfig};
pub use error::{CliError, Result};
pub use output::{Cell, Document, Table};

#[derive(Debug, Parser)]
#[command(name = "decoherence", version, about = "Qubit decoherence and thermalization rates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output file; stdout when absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,

    /// Also emit the leading-order series and fitted rates (oracle only).
    #[arg(long, global = true)]
    pub compare: bool,

    /// Suppress diagnostics on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Resonance energies, rates and timescales.
    Resonances,
    /// Leading-order reduced density matrix on the time grid.
    Evolve,
    /// Exact finite-mode trajectory.
    Oracle,
    /// Resonance records over the `[sweep]` values.
    Sweep,
    /// Tabulate the energy-exchange effectiveness over the `[xi]` grid.
    Xi,
    /// Map spin-boson parameters to the qubit energy basis.
    Spinboson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

/// Runs one invocation, writing the result and returning stderr diagnostics.
pub fn run(cli: &Cli) -> Result<Vec<String>> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::validation("--config", "is required"))?;
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    let mut cfg = parse_config(&text)?;
    if let Some(f) = cli.format {
        cfg.output.format = f.into();
    }
    if let Some(out) = &cli.out {
        cfg.output.path = Some(out.clone());
    }
    let output = match cli.command {
        Command::Resonances => cmd_resonances(&cfg)?,
        Command::Evolve => cmd_evolve(&cfg)?,
        Command::Oracle => cmd_oracle(&cfg, cli.compare)?,
        Command::Sweep => cmd_sweep(&cfg)?,
        Command::Xi => cmd_xi(&cfg)?,
        Command::Spinboson => cmd_spinboson(&cfg)?,
    };
    let text = output.document.render(cfg.output.format);
    match &cfg.output.path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.display().to_string(), source })?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "stdout".to_string(), source })?,
    }
    Ok(output.diagnostics)
}
