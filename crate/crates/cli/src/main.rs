use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use conelab::runner::{
    run_decay_fit, run_inequality_suite, run_lambda_sweep, run_mu_solve, write_report, ExperimentConfig, Report,
};

#[derive(Parser)]
#[command(name = "conelab", version, about = "Entropy functionals and weighted inequalities on cones")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Run {
    /// TOML experiment config.
    config: PathBuf,
    /// Output directory, overriding `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Smallest eigenvalue of -4 Delta + R over a grid of sphere radii and meshes.
    LambdaSweep(Run),
    /// Minimize W for each configured tau.
    MuSolve(Run),
    /// Hardy, scaling, norm, log-Sobolev and entropy-bound checks.
    Inequalities(Run),
    /// Minimize W and fit the tip exponent of the minimizer.
    DecayFit(Run),
}

fn run(command: Command) -> conelab::Result<Report> {
    let (args, f): (Run, fn(&ExperimentConfig) -> conelab::Result<Report>) = match command {
        Command::LambdaSweep(a) => (a, run_lambda_sweep),
        Command::MuSolve(a) => (a, run_mu_solve),
        Command::Inequalities(a) => (a, run_inequality_suite),
        Command::DecayFit(a) => (a, run_decay_fit),
    };
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(out) = args.out {
        cfg.output_dir = out;
    }
    let report = f(&cfg)?;
    for path in write_report(&report, &cfg.output_dir)? {
        println!("wrote {}", path.display());
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            for c in &report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!("{tag} {} (observed {:e}, threshold {:e})", c.name, c.observed, c.threshold);
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
