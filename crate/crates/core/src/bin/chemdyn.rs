use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chemdyn::config::Config;
use chemdyn::models::ModelKind;
use chemdyn::workflow::{run, Command, RunOptions, Shots};

#[derive(Parser)]
#[command(
    name = "chemdyn",
    version,
    about = "Grid-based quantum dynamics with variational and subspace solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Lowest eigenstates of the field-free Hamiltonian.
    Eigen(Common),
    /// Real-time variational propagation of the HVA parameters.
    EvolveVqa(Common),
    /// Propagation in the span of the lowest eigenstates.
    EvolveSubspace(Common),
    /// Full-grid reference propagation.
    EvolveExact(Common),
    /// Harmonic spectrum of a dipole trace.
    Spectrum(Common),
    /// Circuit counts per time step.
    Resources(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    DoubleWell,
    Helium,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long, conflicts_with = "model")]
    config: Option<PathBuf>,
    /// Built-in model with default settings, used when no config is given.
    #[arg(long, value_enum)]
    model: Option<Model>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// `exact` or a positive number of shots per circuit.
    #[arg(long, default_value = "exact")]
    shots: Shots,
    /// Time step in fs.
    #[arg(long)]
    step: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = match cli.command {
        Sub::Eigen(c) => (Command::Eigen, c),
        Sub::EvolveVqa(c) => (Command::EvolveVqa, c),
        Sub::EvolveSubspace(c) => (Command::EvolveSubspace, c),
        Sub::EvolveExact(c) => (Command::EvolveExact, c),
        Sub::Spectrum(c) => (Command::Spectrum, c),
        Sub::Resources(c) => (Command::Resources, c),
    };
    match execute(command, common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(command: Command, common: Common) -> chemdyn::Result<()> {
    let config = match (&common.config, common.model) {
        (Some(path), _) => Config::load(path)?,
        (None, Some(Model::Helium)) => Config::default_for(ModelKind::Helium),
        (None, _) => Config::default_for(ModelKind::DoubleWell),
    };
    let opts = RunOptions {
        config,
        out: common.out,
        seed: common.seed,
        shots: common.shots,
        step_fs: common.step,
    };
    let report = run(command, &opts)?;
    for p in &report.outputs {
        println!("{}", p.display());
    }
    Ok(())
}
