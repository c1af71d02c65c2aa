use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;

use commands::CliError;

/// Squeezed-magnon / spin-qubit model: spectra, dynamics and effective couplings.
#[derive(Debug, Parser)]
#[command(name = "magqrm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Override the Fock cutoff of the config.
    #[arg(long, global = true)]
    n_max: Option<usize>,

    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Sweep the spectrum in ω₀ and locate the standard gap features.
    Spectrum,
    /// Time evolution from a basis state, with population traces.
    Dynamics,
    /// Perturbative coupling breakdown.
    Pert,
    /// Fit the effective coupling surface from exact spectra.
    Fit,
    /// Model parameters estimated from material parameters.
    Estimate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("--config <path> is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let cfg = magqrm_core::RunConfig::parse(&text)?;
    std::fs::create_dir_all(&cli.out).map_err(|e| CliError::io(&cli.out, e))?;
    let ctx = commands::Context {
        cfg,
        out: cli.out.clone(),
        n_max: cli.n_max,
    };
    match cli.command {
        Command::Spectrum => commands::spectrum(&ctx),
        Command::Dynamics => commands::dynamics(&ctx),
        Command::Pert => commands::pert(&ctx),
        Command::Fit => commands::fit(&ctx),
        Command::Estimate => commands::estimate(&ctx),
    }
}
