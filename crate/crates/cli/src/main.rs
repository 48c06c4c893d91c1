//! qcounter: scenario-driven front end for the antinormally ordered
//! photodetection toolkit.
//!
//! Subcommands `gamma`, `g2`, `network`, `mc`, and `order` each take a JSON
//! scenario (strict schema; unknown keys rejected) and write JSON/CSV
//! outputs plus a run manifest into the output directory. Exit status is 0
//! on success, 2 for validation problems, 3 for numerical failures, 1
//! otherwise.

mod exec;
mod manifest;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use qcounter::correlate::CorrelateError;
use qcounter::fock::FockError;
use qcounter::mcsim::McError;
use qcounter::network::NetworkError;
use qcounter::spectral::SpectralError;

use exec::{execute, ExecConfig};
use scenario::{load_scenario, scenario_from_value, OrderScenario, Scenario};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::NonConvergence { .. }
            | SpectralError::NegativeNumerator
            | SpectralError::GammaOutOfRange(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<NetworkError> for CliError {
    fn from(e: NetworkError) -> Self {
        match e {
            NetworkError::Fock(FockError::TruncationLeak { .. }) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<McError> for CliError {
    fn from(e: McError) -> Self {
        match e {
            McError::Network(inner) => inner.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<CorrelateError> for CliError {
    fn from(e: CorrelateError) -> Self {
        match e {
            CorrelateError::NegativeCross => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

#[derive(Parser)]
#[command(name = "qcounter", version, about = "antinormally ordered photodetection toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON scenario file.
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory for JSON/CSV results and the manifest.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Both)]
    format: OutputFormat,
    /// Override the scenario seed (Monte Carlo runs).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct OrderArgs {
    /// Path to a JSON scenario file (kind = "order").
    #[arg(long, conflicts_with = "expr")]
    scenario: Option<PathBuf>,
    /// Inline expression, e.g. "a*a*adag*adag".
    #[arg(long)]
    expr: Option<String>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Both)]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Photon-pair indistinguishability factor from filter/pump bandwidths.
    Gamma(RunArgs),
    /// Modified antinormal intensity correlation vs mean photon number.
    G2(RunArgs),
    /// Truncated-Fock simulation of the full interferometer.
    Network(RunArgs),
    /// Click-level Monte Carlo over the simulated network.
    Mc(RunArgs),
    /// Normal/antinormal ordering and expectations of an operator string.
    Order(OrderArgs),
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let (scenario, raw, cfg) = match cli.command {
        Command::Gamma(args) => prepare("gamma", args)?,
        Command::G2(args) => prepare("g2", args)?,
        Command::Network(args) => prepare("network", args)?,
        Command::Mc(args) => prepare("mc", args)?,
        Command::Order(args) => {
            let cfg = ExecConfig { out_dir: args.out, format: args.format, seed_override: None };
            let (scenario, raw) = match (&args.scenario, &args.expr) {
                (Some(path), None) => load_scenario(path)?,
                (None, Some(expr)) => {
                    let s = Scenario::Order(OrderScenario {
                        expression: expr.clone(),
                        expectations: None,
                    });
                    let raw = s.to_value();
                    (scenario_from_value(&raw)?, raw)
                }
                _ => {
                    return Err(CliError::validation(
                        "order needs exactly one of --scenario or --expr",
                    ))
                }
            };
            if scenario.kind() != "order" {
                return Err(CliError::validation(format!(
                    "subcommand 'order' got a '{}' scenario",
                    scenario.kind()
                )));
            }
            (scenario, raw, cfg)
        }
    };
    execute(&scenario, &raw, &cfg)?;
    Ok(())
}

fn prepare(
    kind: &str,
    args: RunArgs,
) -> Result<(Scenario, serde_json::Value, ExecConfig), CliError> {
    let (scenario, raw) = load_scenario(&args.scenario)?;
    if scenario.kind() != kind {
        return Err(CliError::validation(format!(
            "subcommand '{kind}' got a '{}' scenario",
            scenario.kind()
        )));
    }
    let cfg = ExecConfig { out_dir: args.out, format: args.format, seed_override: args.seed };
    Ok((scenario, raw, cfg))
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
