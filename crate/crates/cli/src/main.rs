//! `cliffield` — Clifford-algebra field engine CLI.
//!
//! Subcommands: `check`, `intertwine`, `connection`, `transport`, `solve`,
//! `example`. Each prints a JSON report to stdout; artifacts go to `--out`.
//! Exit codes: 0 = all residuals within tolerance, 1 = a tolerance failed,
//! 2 = error (malformed input, math failure), with a machine-readable JSON
//! error object on stderr.

mod commands;
mod expr;
mod jobspec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cliffield", version, about = "Clifford-algebra field engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Override the signature as "p,q".
    #[arg(long, global = true)]
    signature: Option<String>,
    /// Override the scalar field: R or C.
    #[arg(long, global = true)]
    field: Option<String>,
    /// Override the grid as "shape;origin;spacing", e.g. "65,65;0,0;0.1,0.1".
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Algebraic tolerance (relations, intertwiner verification).
    #[arg(long, global = true)]
    tol_algebraic: Option<f64>,
    /// Frame-field relation tolerance.
    #[arg(long, global = true)]
    tol_frame: Option<f64>,
    /// Relative closedness tolerance of the potential route.
    #[arg(long, global = true)]
    tol_closed: Option<f64>,
    /// Relative path-independence tolerance.
    #[arg(long, global = true)]
    tol_path: Option<f64>,
    /// Final relation-residual tolerance (default scales with the grid).
    #[arg(long, global = true)]
    tol_final: Option<f64>,
    /// Seed for randomized verification sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory for artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Artifact format for fields.
    #[arg(long, global = true, value_parser = ["json", "bin"], default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Check generator relations (and the odd-n trace condition) of a
    /// constant set or a sampled frame job.
    Check {
        /// A generator-set JSON file.
        #[arg(long, conflicts_with = "job")]
        set: Option<PathBuf>,
        /// A job-spec JSON file defining a frame field.
        #[arg(long)]
        job: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Construct the intertwiner between two constant generator sets.
    Intertwine {
        /// Generator-set JSON file for h.
        #[arg(long = "h")]
        h_set: PathBuf,
        /// Generator-set JSON file for g (defaults to the standard set).
        #[arg(long = "g")]
        g_set: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Compute the spin connection of a frame job and its curvature report.
    Connection {
        #[arg(long)]
        job: PathBuf,
        /// Connection scheme: general or grade1.
        #[arg(long)]
        scheme: Option<String>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run a transport method on a stored connection field.
    Transport {
        /// A `.field.json`/`.field.bin` file holding a connection.
        #[arg(long)]
        connection: PathBuf,
        /// Method: ode-r1, potential, path-ordered or auto.
        #[arg(long, default_value = "auto")]
        method: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Full pipeline: connection, transport, intertwiner, T = S K.
    Solve {
        #[arg(long)]
        job: PathBuf,
        /// Transport method override (auto by default).
        #[arg(long)]
        method: Option<String>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run a built-in fixture (1..4) and compare against its closed forms.
    Example {
        /// Fixture number: 1..4.
        number: u8,
        /// Override a fixture parameter, e.g. --param phi="sin(x1)".
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, String)>,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn parse_param(text: &str) -> Result<(String, String), String> {
    match text.split_once('=') {
        Some((name, value)) if !name.is_empty() => {
            Ok((name.trim().to_string(), value.to_string()))
        }
        _ => Err("expected name=expression".to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Check { set, job, common } => commands::check(set, job, common),
        Command::Intertwine {
            h_set,
            g_set,
            common,
        } => commands::intertwine(h_set, g_set, common),
        Command::Connection {
            job,
            scheme,
            common,
        } => commands::connection(job, scheme, common),
        Command::Transport {
            connection,
            method,
            common,
        } => commands::transport(connection, method, common),
        Command::Solve {
            job,
            method,
            common,
        } => commands::solve(job, method, common),
        Command::Example {
            number,
            params,
            common,
        } => commands::example(*number, params, common),
    };
    match outcome {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            let error = serde_json::json!({
                "error": {
                    "message": format!("{err:#}"),
                }
            });
            eprintln!("{}", serde_json::to_string_pretty(&error).expect("error json"));
            ExitCode::from(2)
        }
    }
}
