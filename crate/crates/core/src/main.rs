use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use flowinfer::cli::{cmd_consistency, cmd_defaults, cmd_observe, cmd_posterior, cmd_solve, RunConfig};
use flowinfer::{Error, Result};

/// Bayesian inference of a stationary incompressible flow from point
/// observations of an advected and diffused scalar.
#[derive(Parser)]
#[command(name = "flowinfer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the advection-diffusion equation and export trajectories.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a design and write synthetic observations.
    Observe {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run pCN chains and the quadrature posterior for an observation file.
    Posterior {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        observations: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a consistency experiment, or re-run a stored record.
    Consistency {
        #[arg(long, required_unless_present = "rerun")]
        config: Option<PathBuf>,
        /// Record to reproduce; exits with status 2 if the summaries differ.
        #[arg(long)]
        rerun: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print every configuration key with its default.
    Defaults,
}

fn out_dir(flag: Option<PathBuf>, config: Option<&RunConfig>) -> PathBuf {
    flag.or_else(|| config.map(|c| c.output_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn load(path: &Path) -> Result<RunConfig> {
    RunConfig::from_file(path)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::config("threads", e.to_string()))?;
    }
    let written = match cli.command {
        Command::Defaults => {
            print!("{}", cmd_defaults());
            return Ok(());
        }
        Command::Solve { config, out } => {
            let config = load(&config)?;
            cmd_solve(&config, &out_dir(out, Some(&config)))?
        }
        Command::Observe { config, out } => {
            let config = load(&config)?;
            cmd_observe(&config, &out_dir(out, Some(&config)))?
        }
        Command::Posterior { config, observations, out } => {
            let config = load(&config)?;
            cmd_posterior(&config, &observations, &out_dir(out, Some(&config)))?
        }
        Command::Consistency { config, rerun, out } => {
            let config = config.as_deref().map(load).transpose()?;
            cmd_consistency(config.as_ref(), rerun.as_deref(), &out_dir(out, config.as_ref()))?
        }
    };
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
