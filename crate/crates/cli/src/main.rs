// Copyright 2026 FEME Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use feme_cli::commands;
use feme_cli::{CliError, Format, Overrides, RunConfig};

#[derive(Parser)]
#[command(
    name = "feme",
    version,
    about = "Driven qubit coupled to a finite calorimeter"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration; missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    lambda0: Option<f64>,
    #[arg(long, global = true)]
    g: Option<f64>,
    /// Calorimeter size; also replaces the size lists of sweep and trscan.
    #[arg(long, global = true)]
    n_units: Option<usize>,
    #[arg(long, global = true)]
    theta: Option<f64>,
    #[arg(long, global = true)]
    phi: Option<f64>,
    #[arg(long, global = true)]
    t_end: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Distances, rates and rate sign changes for one initial pair.
    Trace,
    /// BLP measure maximized over initial pairs.
    Blp,
    /// BLP over the (lambda0, g) grid and its ridge, per calorimeter size.
    Sweep {
        /// Replace the dynamics by a planted ridge of this ratio.
        #[arg(long)]
        synthetic_ridge: Option<f64>,
    },
    /// Backflow onset along the ridge and its power-law fit.
    Trscan,
    /// Checks against closed-form and brute-force references.
    Selftest,
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        out: cli.out.clone(),
        workers: cli.workers,
        format: cli.format,
        lambda0: cli.lambda0,
        g: cli.g,
        n_units: cli.n_units,
        theta: cli.theta,
        phi: cli.phi,
        t_end: cli.t_end,
    });
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    if let Command::Selftest = cli.command {
        let checks = commands::selftest()?;
        for c in &checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            println!("{tag} {}: {}", c.name, c.detail);
        }
        return Ok(checks.iter().all(|c| c.passed));
    }
    let cfg = load(cli)?;
    let out = match &cli.command {
        Command::Trace => commands::trace(&cfg)?,
        Command::Blp => commands::blp(&cfg)?,
        Command::Sweep { synthetic_ridge } => {
            if let Some(r) = synthetic_ridge {
                if !(r.is_finite() && *r > 0.0) {
                    return Err(CliError::Config(
                        "--synthetic-ridge: must be finite and > 0".into(),
                    ));
                }
            }
            commands::sweep(&cfg, *synthetic_ridge)?
        }
        Command::Trscan => commands::trscan(&cfg)?,
        Command::Selftest => unreachable!(),
    };
    for path in out.written() {
        println!("{}", path.display());
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
