//! `sobstencil` command-line workbench: build stencils, probe node sets and
//! run convergence-rate studies from JSON configs.

mod commands;
mod config;
mod error;
mod nodes;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sobstencil::functionals::Functional;

use crate::commands::QmaxArgs;
use crate::config::Overrides;
use crate::error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "sobstencil", version, about = "Numerical differentiation stencils and their error analysis")]
struct Cli {
    /// Working precision in bits, overriding the config.
    #[arg(long, global = true)]
    precision_bits: Option<u32>,

    /// Seed for generated node sets, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a stencil from a config and write it as JSON.
    Build { config: PathBuf },
    /// Largest polynomial exactness order attainable on a node set.
    Qmax {
        /// Node file (`d=<dim>` header, one comma-separated point per line).
        nodes: Option<PathBuf>,
        /// point_value, laplacian, partial:<a1>,<a2>,... or a JSON object.
        #[arg(long, default_value = "laplacian")]
        functional: String,
        #[arg(long, default_value_t = 16)]
        cap: usize,
        /// Use COUNT random nodes in [-1,1]^dim instead of a file.
        #[arg(long, value_name = "COUNT")]
        random: Option<usize>,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0.0)]
        min_separation: f64,
    },
    /// Error norms along an h grid, with log-log slopes.
    Rate {
        config: PathBuf,
        /// Replace the norms by h^K to check the slope machinery.
        #[arg(long, value_name = "K")]
        synthetic_power: Option<f64>,
    },
    /// Norm ratios between method pairs along an h grid.
    Compare { config: PathBuf },
    /// Singular values of the polynomial value matrix of a node set.
    SvdDiag {
        nodes: PathBuf,
        #[arg(long)]
        q: usize,
    },
    /// Quick checks against known answers.
    SelfTest,
}

fn parse_functional(text: &str) -> CliResult<Functional> {
    let t = text.trim();
    if t.starts_with('{') {
        return serde_json::from_str(t).map_err(|e| CliError::Usage(format!("functional: {e}")));
    }
    match t {
        "point_value" | "point" => Ok(Functional::PointValue),
        "laplacian" => Ok(Functional::Laplacian),
        _ => {
            let alpha = t
                .strip_prefix("partial:")
                .ok_or_else(|| CliError::Usage(format!("unknown functional `{t}`")))?;
            let alpha = alpha
                .split(',')
                .map(|a| a.trim().parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::Usage(format!("invalid multi-index `{alpha}`")))?;
            Ok(Functional::Partial { alpha })
        }
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    let overrides = Overrides { precision_bits: cli.precision_bits, seed: cli.seed };
    if let Some(bits) = cli.precision_bits {
        if bits < sobstencil::scalar::MIN_PRECISION {
            return Err(CliError::Usage(format!(
                "--precision-bits must be at least {}",
                sobstencil::scalar::MIN_PRECISION
            )));
        }
    }
    match cli.command {
        Command::Build { config } => commands::build(&config, overrides)?,
        Command::Qmax { nodes, functional, cap, random, dim, min_separation } => {
            let args = QmaxArgs {
                nodes,
                functional: parse_functional(&functional)?,
                cap,
                random: random.map(|n| (n, dim, min_separation)),
            };
            commands::qmax(args, overrides)?
        }
        Command::Rate { config, synthetic_power } => commands::rate(&config, overrides, synthetic_power)?,
        Command::Compare { config } => commands::compare(&config, overrides)?,
        Command::SvdDiag { nodes, q } => commands::svd_diag(&nodes, q, overrides)?,
        Command::SelfTest => return Ok(commands::self_test()),
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let mut report = serde_json::json!({ "kind": e.kind(), "message": e.to_string() });
            if let Some(hint) = e.hint() {
                report["hint"] = hint.into();
            }
            eprintln!("{report}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
