use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hemdd::experiment::{
    emit_report, load_config, run_checks, run_point, run_sweep, spectrum_csv, Format, SweepPoint,
};
use hemdd::Error;

#[derive(Parser)]
#[command(name = "hemdd", version, about = "Two-level Schwarz solver laboratory for high-contrast problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment configuration (JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "csv")]
    format: Format,
    /// Worker threads for local solves and sweep points
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for the randomized checks
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the base configuration once
    Solve,
    /// Run the cartesian product of the sweep lists
    Sweep,
    /// Dump interface eigenvalues at the base contrast
    Spectrum,
    /// Run the invariant checks at the largest contrast
    Check,
}

fn run(cli: &Cli) -> hemdd::Result<(String, bool)> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Usage("--config is required".into()))?;
    let cfg = load_config(path)?;
    match cli.command {
        Command::Solve => {
            let contrast = cfg.alpha.contrast;
            let problem = cfg.build_problem(contrast)?;
            let point = SweepPoint {
                kind: cfg.coarse.kind,
                m: cfg.coarse.m,
                delta: cfg.delta_layers,
                contrast,
            };
            let (row, _) = run_point(&cfg, &problem, &point)?;
            Ok((emit_report(&[row], cli.format), true))
        }
        Command::Sweep => Ok((emit_report(&run_sweep(&cfg), cli.format), true)),
        Command::Spectrum => {
            let problem = cfg.build_problem(cfg.alpha.contrast)?;
            Ok((spectrum_csv(&problem.spectra), true))
        }
        Command::Check => {
            let outcomes = run_checks(&cfg, cli.seed)?;
            let mut text = String::new();
            for c in &outcomes {
                let status = if c.passed { "PASS" } else { "FAIL" };
                text += &format!("{status} {}: {}\n", c.name, c.detail);
            }
            Ok((text, outcomes.iter().all(|c| c.passed)))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok((text, ok)) => {
            if let Some(out) = &cli.out {
                if let Err(e) = std::fs::write(out, &text) {
                    eprintln!("error: cannot write {}: {e}", out.display());
                    return ExitCode::from(1);
                }
            } else {
                print!("{text}");
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
