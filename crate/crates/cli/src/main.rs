//! `wmdistill`: sweeps, figure data, optimal filter search and oracle
//! validation from the command line.
//!
//! Exit status: 0 on success, 1 when a validation row fails, 2 for bad
//! configuration or any other error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wmdistill::oracle::{run_validation, ValidationConfig, DEFAULT_SAMPLES, DEFAULT_SEED};
use wmdistill::sweep::{
    figure_preset, run_sweep, write_outputs, GridRange, Param, Protocol, SweepConfig,
};
use wmdistill::Error;

#[derive(Parser)]
#[command(
    name = "wmdistill",
    version,
    about = "Weak-measurement-assisted entanglement distribution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one protocol over a parameter grid.
    Sweep(Box<SweepArgs>),
    /// Regenerate the data behind one figure preset.
    Figure {
        /// One of 1a 1b 1c 1d 2 3 4 5 6 7 8 9.
        id: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Replay every protocol on density matrices and compare with the closed forms.
    Validate {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// W-state sizes to replay.
        #[arg(long = "N", value_delimiter = ',', default_value = "3,4,5")]
        parties: Vec<usize>,
        /// Write the full report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Shift every closed form by this amount (harness self-test).
        #[arg(long, default_value_t = 0.0, hide = true)]
        perturb: f64,
    },
    /// Best filter strength for W-state distribution at each damping rate.
    OptimalW {
        #[arg(long = "N", default_value_t = 3)]
        parties: usize,
        #[arg(long)]
        d: String,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// bell-twocopy, bell-bisection, bell-nonmax, ghz, w-state, w-ratio,
    /// w-asymptotic, optimal-w or validate.
    #[arg(long, required_unless_present = "config")]
    protocol: Option<String>,
    /// JSON file holding a full sweep configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Ranges as start:stop:step (or a single value). Axes are nested in
    /// the order N, d, d1, d2, w, w1, w2.
    #[arg(long = "N")]
    parties: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    d1: Option<String>,
    #[arg(long)]
    d2: Option<String>,
    #[arg(long)]
    w: Option<String>,
    #[arg(long)]
    w1: Option<String>,
    #[arg(long)]
    w2: Option<String>,
    /// Two-copy rounds.
    #[arg(long)]
    m: Option<usize>,
    /// Bisection source pairs.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
}

impl SweepArgs {
    fn into_config(self) -> Result<(SweepConfig, PathBuf), Error> {
        // clap guarantees at least one of the two
        let mut cfg = match &self.config {
            Some(path) => SweepConfig::load(path)?,
            None => SweepConfig::new(Protocol::Validate),
        };
        if let Some(p) = &self.protocol {
            cfg.protocol = p.parse()?;
        }
        let ranges = [
            (Param::N, &self.parties),
            (Param::D, &self.d),
            (Param::D1, &self.d1),
            (Param::D2, &self.d2),
            (Param::W, &self.w),
            (Param::W1, &self.w1),
            (Param::W2, &self.w2),
        ];
        for (param, range) in ranges {
            if let Some(r) = range {
                cfg.axes.retain(|a| a.param != param);
                cfg.axes.push(wmdistill::sweep::Axis {
                    param,
                    range: r.parse::<GridRange>()?,
                });
            }
        }
        if let Some(m) = self.m {
            cfg.fixed.m = m;
        }
        if let Some(n) = self.n {
            cfg.fixed.n = n;
        }
        if let Some(e) = self.epsilon {
            cfg.fixed.epsilon = e;
        }
        if let Some(j) = self.jobs {
            cfg.jobs = j;
        }
        Ok((cfg, self.out))
    }
}

fn sweep_to(cfg: &SweepConfig, out: &Path) -> Result<(), Error> {
    let table = run_sweep(cfg)?;
    write_outputs(&table, cfg, out)?;
    println!("{} rows -> {}", table.rows.len(), out.display());
    Ok(())
}

#[derive(Debug, PartialEq, Eq)]
enum Outcome {
    Done,
    ValidationFailed,
}

fn exit_status(result: &Result<Outcome, Error>) -> u8 {
    match result {
        Ok(Outcome::Done) => 0,
        Ok(Outcome::ValidationFailed) => 1,
        Err(_) => 2,
    }
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::Sweep(args) => {
            let (cfg, out) = args.into_config()?;
            sweep_to(&cfg, &out)?;
        }
        Command::Figure { id, out, jobs } => {
            let mut cfg = figure_preset(&id)?;
            if let Some(j) = jobs {
                cfg.jobs = j;
            }
            sweep_to(&cfg, &out)?;
        }
        Command::OptimalW {
            parties,
            d,
            epsilon,
            out,
            jobs,
        } => {
            let mut cfg = SweepConfig::new(Protocol::OptimalW).axis(Param::D, &d)?;
            cfg.fixed.parties = parties;
            cfg.fixed.epsilon = epsilon;
            cfg.jobs = jobs.unwrap_or(1);
            sweep_to(&cfg, &out)?;
        }
        Command::Validate {
            seed,
            samples,
            parties,
            out,
            perturb,
        } => {
            let report = run_validation(&ValidationConfig {
                seed,
                samples,
                parties,
                perturb,
            })?;
            for row in report.rows.iter().filter(|r| !r.report.pass) {
                eprintln!(
                    "FAIL {} [{}] {}: closed {:e} simulated {:e} (|diff| {:.3e})",
                    row.suite,
                    row.case,
                    row.report.quantity,
                    row.report.closed_form,
                    row.report.simulated,
                    row.report.abs_error
                );
            }
            if let Some(path) = out {
                report.write_json(&path)?;
            }
            println!(
                "seed {seed}: {} checks, {} failed",
                report.rows.len(),
                report.failures
            );
            if !report.passed() {
                return Ok(Outcome::ValidationFailed);
            }
        }
    }
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    let result = run(Cli::parse());
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    ExitCode::from(exit_status(&result))
}
