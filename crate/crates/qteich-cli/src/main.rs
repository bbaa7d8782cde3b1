//! `qteich`: JSON-in, JSON-out front end for the qteich library.

mod commands;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "qteich", version, about = "Quantum Teichmüller computations on punctured surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Opts {
    /// JSON input file; `-` reads stdin. Commands with defaults run without it.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Root-of-unity order N.
    #[arg(long = "N", global = true)]
    pub order: Option<usize>,
    /// Numerical tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Seed for random representations.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum Command {
    /// Validate a triangulation and report its edges and surface type.
    Triangulate,
    /// The Weil–Petersson form σ of a triangulation.
    Sigma,
    /// Dual graph, ε(a, b) and the first Betti number.
    DualGraph,
    /// Shortest flip/reindex sequence between two triangulations.
    FlipPath,
    /// Build (or read) a local representation and its generator images.
    RepBuild,
    /// Invariants x_i and h of a local representation.
    RepInvariants,
    /// Intertwiner for one elementary move.
    Intertwine,
    /// Pentagon relation and action additivity.
    PentagonCheck,
    /// The H₁(S; Z_N) orbit of an intertwiner.
    Orbit,
    /// Pseudo-Anosov invariant of a mapping class.
    PaInvariant,
    /// Run every acceptance criterion.
    Selftest,
}

/// Bad invocation or unreadable input: exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn emit(value: &serde_json::Value, output: Option<&PathBuf>) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match output {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command, &cli.opts) {
        Ok(out) => {
            if let Err(e) = emit(&out.value, cli.opts.output.as_ref()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.is::<UsageError>() { 2 } else { 1 })
        }
    }
}
