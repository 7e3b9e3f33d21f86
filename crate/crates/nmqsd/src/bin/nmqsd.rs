//! Experiment driver CLI. Exit codes: 0 success, 1 runtime failure,
//! 2 usage or validation error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nmqsd::config::{ExperimentConfig, SolverMethod};
use nmqsd::{driver, Error};

#[derive(Parser)]
#[command(
    name = "nmqsd",
    version,
    about = "Non-Markovian open-system simulations of two coupled oscillators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Run directory; defaults to <out root>/<config stem>. The out root is
    /// `runs` or `$NMQSD_OUT_ROOT`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Overrides ensemble.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides ensemble.count.
    #[arg(long)]
    trajectories: Option<usize>,
    /// Worker threads for ensemble solvers; 0 = one per core.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the master equation.
    RunMaster(Common),
    /// Integrate a stochastic trajectory ensemble.
    RunQsd {
        #[command(flatten)]
        common: Common,
        /// Linear (unnormalized) unraveling.
        #[arg(long, conflicts_with = "nonlinear")]
        linear: bool,
        /// Nonlinear (norm-stabilized) unraveling.
        #[arg(long)]
        nonlinear: bool,
    },
    /// Propagate the Gaussian covariance matrix.
    RunGaussian(Common),
    /// Master equation vs QSD ensemble on the same grid.
    Compare(Common),
    /// One run per drive frequency in [sweep]; emits sweep.csv.
    Sweep(Common),
}

fn load(
    common: &Common,
    method: Option<SolverMethod>,
) -> Result<(ExperimentConfig, PathBuf), Error> {
    let text = std::fs::read_to_string(&common.config)?;
    let mut config = ExperimentConfig::from_toml_str(&text)?;
    if let Some(method) = method {
        config.solver.method = method;
    }
    if let Some(seed) = common.seed {
        config.ensemble.seed = seed;
    }
    if let Some(count) = common.trajectories {
        config.ensemble.count = count;
    }
    if let Some(workers) = common.workers {
        config.ensemble.workers = workers;
    }
    config.validate()?;
    let dir = match (&common.out_dir, &config.output.directory) {
        (Some(d), _) => d.clone(),
        (None, Some(d)) => PathBuf::from(d),
        (None, None) => {
            let stem = common
                .config
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "run".into());
            driver::default_out_root().join(stem)
        }
    };
    Ok((config, dir))
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::RunMaster(common) => {
            let (config, dir) = load(&common, Some(SolverMethod::Master))?;
            let out = driver::run(&config, &dir)?;
            eprintln!("run complete: {}", out.dir.display());
        }
        Command::RunQsd {
            common,
            linear,
            nonlinear,
        } => {
            let method = if nonlinear {
                SolverMethod::NonlinearQsd
            } else if linear {
                SolverMethod::LinearQsd
            } else {
                return Err(Error::Config(
                    "run-qsd: pass --linear or --nonlinear".into(),
                ));
            };
            let (config, dir) = load(&common, Some(method))?;
            let out = driver::run(&config, &dir)?;
            eprintln!(
                "run complete: {} ({} trajectories, {} resampled)",
                out.dir.display(),
                out.manifest.trajectories,
                out.manifest.failed_trajectories
            );
        }
        Command::RunGaussian(common) => {
            let (config, dir) = load(&common, Some(SolverMethod::Gaussian))?;
            let out = driver::run(&config, &dir)?;
            eprintln!("run complete: {}", out.dir.display());
        }
        Command::Compare(common) => {
            let (config, dir) = load(&common, None)?;
            let out = driver::compare(&config, &dir)?;
            eprintln!("compare complete: {}", out.dir.display());
        }
        Command::Sweep(common) => {
            let (config, dir) = load(&common, None)?;
            let summaries = driver::sweep(&config, &dir)?;
            eprintln!(
                "sweep complete: {} frequencies -> {}",
                summaries.len(),
                dir.join("sweep.csv").display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) | Err(e @ Error::Domain(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
