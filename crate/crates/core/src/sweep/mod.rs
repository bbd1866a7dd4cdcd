//! Parameter sweeps over the protocols, with deterministic tabular output.
//!
//! A sweep is a protocol, a list of axes and a set of fixed parameters. Grid
//! points run on a bounded worker pool; rows come back in row-major axis
//! order no matter how many workers ran them.

mod config;
mod eval;
mod figures;
mod output;

pub use config::{Axis, FixedParams, GridRange, Param, Protocol, SweepConfig};
pub use figures::{figure_preset, FIGURE_IDS};
pub use output::{meta_path, write_outputs, Table};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Evaluates every grid point of `cfg`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Table> {
    cfg.validate()?;
    if cfg.protocol == Protocol::Validate {
        return eval::validation_table(&cfg.fixed);
    }
    let points = cfg.points();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", cfg.jobs)))?;
    let cells: Vec<Vec<String>> = pool.install(|| {
        points
            .par_iter()
            .map(|p| eval::evaluate(cfg.protocol, &cfg.fixed, &cfg.axes, p))
            .collect()
    });
    let mut header: Vec<String> = cfg
        .axes
        .iter()
        .map(|a| a.param.name().to_string())
        .collect();
    header.extend(eval::columns(cfg.protocol).iter().map(|c| c.to_string()));
    let rows = points
        .iter()
        .zip(cells)
        .map(|(p, mut c)| {
            let mut row: Vec<String> = p
                .iter()
                .zip(&cfg.axes)
                .map(|(v, a)| a.param.format(*v))
                .collect();
            row.append(&mut c);
            row
        })
        .collect();
    Ok(Table { header, rows })
}
