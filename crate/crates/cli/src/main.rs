use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use feec_ns::experiments::{mesh_info_from, run_experiment, ConfigEntries, ExperimentSpec};

/// Whitney-form Navier-Stokes experiments on box meshes.
#[derive(Parser)]
#[command(name = "feec-ns", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Potential body force with homogeneous boundary data: the velocity must vanish.
    Noflow(Settings),
    /// Convergence sweep against the Ethier-Steinman flow (steady when d = 0).
    Ethier(Settings),
    /// One step from the exact Ethier state for a decreasing list of time steps.
    Dtsweep(Settings),
    /// Convergence sweep for a manufactured Stokes solution.
    StokesMms(Settings),
    /// Mesh counts, Euler characteristic and harmonic form dimensions.
    MeshInfo(Settings),
}

#[derive(Args)]
struct Settings {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config value, e.g. `--set n=2,3,4`. May be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Settings {
    fn entries(&self) -> Result<ConfigEntries> {
        let mut entries = match &self.config {
            Some(path) => {
                ConfigEntries::read(path).with_context(|| format!("reading {}", path.display()))?
            }
            None => ConfigEntries::default(),
        };
        for s in &self.set {
            entries
                .push_override(s)
                .with_context(|| format!("--set {s}"))?;
        }
        Ok(entries)
    }
}

fn run(cli: Cli) -> Result<()> {
    let (name, settings) = match &cli.command {
        Command::Noflow(s) => ("noflow", s),
        Command::Ethier(s) => ("ethier", s),
        Command::Dtsweep(s) => ("dtsweep", s),
        Command::StokesMms(s) => ("stokes-mms", s),
        Command::MeshInfo(s) => ("mesh-info", s),
    };
    let entries = settings.entries()?;
    let start = Instant::now();
    if name == "mesh-info" {
        for info in mesh_info_from(&entries)? {
            println!("{info}");
        }
    } else {
        let spec = ExperimentSpec::for_command(name, &entries)?;
        log::info!("running {} on n = {:?}", spec.kind, spec.n);
        print!("{}", run_experiment(&spec)?);
        if let Some(dir) = &spec.output {
            log::info!("results written to {}", dir.display());
        }
    }
    log::info!("finished in {:.2?}", start.elapsed());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
