use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use l1tik::solvers::Method;
use l1tik::tomo::{NoiseModel, ProblemInstance};
use l1tik_cli::experiment::cell_seed;
use l1tik_cli::{parse_config, run_experiment, write_instance, ExperimentConfig};

#[derive(Parser)]
#[command(name = "l1tik", version, about = "Sparsity-regularized CT reconstruction experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config file).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base random seed (overrides the config file).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the system matrix, phantom and sinograms of one instance.
    Generate {
        #[command(flatten)]
        common: Common,
        /// Relative noise level; defaults to the first configured level.
        #[arg(long)]
        noise: Option<f64>,
    },
    /// Run a single solver at a single noise level.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        solver: String,
        #[arg(long)]
        noise: Option<f64>,
    },
    /// Run every configured solver at every configured noise level.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check the numerical core against independent oracles.
    Verify {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn load(common: &Common, fallback: &[Method]) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => parse_config(path)?,
        None => ExperimentConfig::with_solvers(fallback),
    };
    if let Some(out) = &common.out {
        cfg.output = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn print_summary(summary: &l1tik_cli::Summary) {
    for r in &summary.rows {
        println!(
            "{:<16} noise={:<6} rep={} n*={:<6} stop={:<12} residual={:.4e} rel_error={:.4} wall={:.3}s",
            r.solver.name(),
            r.noise_rel,
            r.repetition,
            r.n_star,
            r.stop_reason,
            r.residual,
            r.rel_error,
            r.wall_s
        );
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate { common, noise } => {
            let cfg = load(&common, &[])?;
            let level = noise.or(cfg.noise_levels.first().copied()).unwrap_or(0.0);
            let instance = ProblemInstance::<f64>::generate(
                cfg.geometry,
                NoiseModel::new(level, cell_seed(cfg.seed, 0, 0)),
            )?;
            for path in write_instance(&cfg.output, &instance)? {
                println!("{}", path.display());
            }
        }
        Command::Solve {
            common,
            solver,
            noise,
        } => {
            let method: Method = solver.parse()?;
            let mut cfg = load(&common, &[method])?;
            let settings = cfg
                .solvers
                .iter()
                .find(|s| s.method == method)
                .cloned()
                .unwrap_or_else(|| l1tik_cli::SolverSettings::defaults(method));
            cfg.solvers = vec![settings];
            if let Some(level) = noise {
                cfg.noise_levels = vec![level];
            }
            cfg.noise_levels.truncate(1);
            cfg.repetitions = 1;
            print_summary(&run_experiment(&cfg).context("solve failed")?);
        }
        Command::Sweep { common, threads } => {
            let mut cfg = load(&common, &Method::ALL)?;
            if let Some(t) = threads {
                cfg.threads = t.max(1);
            }
            print_summary(&run_experiment(&cfg).context("sweep failed")?);
        }
        Command::Verify { seed } => {
            let checks = l1tik_cli::verify::run_checks(seed);
            let mut ok = true;
            for c in &checks {
                println!("{} {:<16} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                ok &= c.passed;
            }
            return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
    }
    Ok(ExitCode::SUCCESS)
}
