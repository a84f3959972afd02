//! `monogamy-lab`: regenerates the monogamy datasets, runs the squeezing
//! protocol and inverts calibration curves.
//!
//! Every subcommand writes CSV files plus a JSON manifest recording the
//! resolved configuration, the library version, the wall time and the
//! SHA-256 digest of each output. Outputs do not depend on `--threads`.
//!
//! Exit codes: 0 success, 1 property violation, 2 I/O or parse error,
//! 3 resource cap, 4 ambiguous inversion.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use monogamy_core::hamiltonians::HamiltonianKind;

use config::ConfigFile;
use error::{CliError, EXIT_IO};

#[derive(Debug, Parser)]
#[command(name = "monogamy-lab", version, about = "Entanglement monogamy datasets and squeezing-based entanglement estimation")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "MONOGAMY_LAB_THREADS")]
    threads: Option<usize>,

    /// `key = value` file supplying defaults for any flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Concurrence of random three-qubit states against the maximal-concurrence bound.
    Fig2(Fig2Args),
    /// Negativity region of random two-qubit spectra.
    Fig3(Fig3Args),
    /// Run the protocol and write its calibration trace.
    Protocol(ProtocolArgs),
    /// Evolve one subsystem state for a long time, tracking squeezing and negativity.
    Explore(ExploreArgs),
    /// Pure coherent subsystems of several sizes under each twisting Hamiltonian.
    AppendixB(AppendixBArgs),
    /// Estimate the A|B linear entropy from a measured minimal squeezing.
    Invert(InvertArgs),
}

#[derive(Debug, Args)]
pub struct Fig2Args {
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    /// Subtracted from every bound before checking; exercises the failure path.
    #[arg(long, hide = true, allow_hyphen_values = true)]
    bound_offset: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Fig3Args {
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ProtocolSetup {
    /// Qubits in A.
    #[arg(long)]
    na: Option<usize>,
    /// Qubits in B.
    #[arg(long)]
    nb: Option<usize>,
    /// Hamiltonian preparing the A|B state (oat, tat, tf, ghz).
    #[arg(long)]
    hab: Option<HamiltonianKind>,
    /// Hamiltonian applied to A alone.
    #[arg(long)]
    ha: Option<HamiltonianKind>,
    /// Points of the `Omega t` grid.
    #[arg(long)]
    t_steps: Option<usize>,
    /// Points of the `Omega' t'` grid.
    #[arg(long)]
    tp_steps: Option<usize>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    tp_max: Option<f64>,
    /// `omega / Omega` of the TF Hamiltonian.
    #[arg(long)]
    transverse_ratio: Option<f64>,
    /// Width in `t'` at which the refinement stops.
    #[arg(long)]
    refine_tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ProtocolArgs {
    #[command(flatten)]
    setup: ProtocolSetup,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    /// Qubits in A (default 4).
    #[arg(long)]
    na: Option<usize>,
    /// Qubits in B (default 4).
    #[arg(long)]
    nb: Option<usize>,
    #[arg(long)]
    hab: Option<HamiltonianKind>,
    /// Hamiltonian of the trace used to pick the reference state.
    #[arg(long)]
    ref_ha: Option<HamiltonianKind>,
    #[arg(long)]
    t_steps: Option<usize>,
    #[arg(long)]
    tp_steps: Option<usize>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    transverse_ratio: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Use the state at this `Omega t` instead of a reference state.
    #[arg(long)]
    at: Option<f64>,
    /// Reference state: p1, p2 or p3.
    #[arg(long, conflicts_with = "at")]
    reference: Option<String>,
    /// Hamiltonian evolving A.
    #[arg(long)]
    ha: Option<HamiltonianKind>,
    /// Largest `Omega' t'` (default 100).
    #[arg(long)]
    tp_max: Option<f64>,
    /// Points along the evolution (default 2001).
    #[arg(long)]
    steps: Option<usize>,
    /// Qubits of A on one side of the negativity split, e.g. `0,1`.
    #[arg(long)]
    split: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AppendixBArgs {
    /// Comma-separated even sizes up to 8.
    #[arg(long)]
    sizes: Option<String>,
    /// Comma-separated Hamiltonians.
    #[arg(long)]
    kinds: Option<String>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    transverse_ratio: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory receiving one CSV per size and Hamiltonian.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct InvertArgs {
    /// CSV written by `protocol`.
    #[arg(long)]
    curve: PathBuf,
    /// Measured minimal squeezing of A.
    #[arg(long)]
    xi2: f64,
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let threads = match cli.threads {
        Some(t) => Some(t),
        None => file.get::<usize>("threads")?,
    };
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Parse(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Fig2(a) => commands::fig2(a, &file),
        Command::Fig3(a) => commands::fig3(a, &file),
        Command::Protocol(a) => commands::protocol(a, &file),
        Command::Explore(a) => commands::explore(a, &file),
        Command::AppendixB(a) => commands::appendix_b(a, &file),
        Command::Invert(a) => commands::invert_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_IO } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
