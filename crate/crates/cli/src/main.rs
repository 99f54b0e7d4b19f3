use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use depolab::experiment::{self, ExperimentConfig};
use depolab::statevector::QubitCap;

#[derive(Parser)]
#[command(name = "depolab", version, about = "Globally depolarized circuit sampling: simulation and bound checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact output distribution of a circuit, plus seeded samples.
    Simulate(Flags),
    /// Depolarized distributions over a fidelity grid, plus seeded samples.
    Depolarize(Flags),
    /// Uniform-sampler additive and multiplicative certificates.
    Certify(Flags),
    /// Randomized ancilla construction: acceptance and mixture checks.
    Thm1(Flags),
    /// Acceptance thresholds for a multiplicative-error sampler.
    SbpGap(Flags),
    /// k-copy distinguishability chain against the maximally mixed state.
    Discriminate(Flags),
}

#[derive(Args)]
struct Flags {
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Comma-separated fidelity grid.
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    fidelity: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 3)]
    r: u32,
    /// Main-register width (sbp-gap) or random-state width (discriminate).
    #[arg(long, default_value_t = 1)]
    w: u32,
    #[arg(long, default_value_t = 4)]
    m: u32,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall time in the report (breaks byte-for-byte reproducibility).
    #[arg(long)]
    timing: bool,
}

fn config(command: Command) -> Result<ExperimentConfig, depolab::Error> {
    use experiment::Subcommand as S;
    let (sub, f) = match command {
        Command::Simulate(f) => (S::Simulate, f),
        Command::Depolarize(f) => (S::Depolarize, f),
        Command::Certify(f) => (S::Certify, f),
        Command::Thm1(f) => (S::Thm1, f),
        Command::SbpGap(f) => (S::SbpGap, f),
        Command::Discriminate(f) => (S::Discriminate, f),
    };
    let cap = QubitCap::from_env_value(std::env::var(QubitCap::ENV_VAR).ok().as_deref())?;
    Ok(ExperimentConfig {
        subcommand: sub,
        circuit_path: f.circuit,
        fidelity_grid: f.fidelity,
        seed: f.seed,
        samples: f.samples,
        k: f.k,
        r: f.r,
        w: f.w,
        m: f.m,
        epsilon: f.epsilon,
        out_path: f.out,
        max_qubits: cap,
        timing: f.timing,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = config(cli.command)
        .and_then(|cfg| experiment::run_experiment(&cfg))
        .and_then(|report| report.emit().map(|_| report.exit_code()));
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("depolab: {e}");
            ExitCode::from(experiment::ExitCode::for_error(&e) as u8)
        }
    }
}
