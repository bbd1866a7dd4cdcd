//! Per-point evaluation: one protocol, one grid point, one row of cells.

use super::config::{Axis, FixedParams, Param, Protocol};
use super::output::Table;
use crate::bell::{
    bell_filtered_state, bisection_efficiency, nonmax_initial_pipeline, two_copy_efficiency,
    BellScenario,
};
use crate::channels::{AdParams, NrwmParams};
use crate::error::Result;
use crate::multipartite::{
    asymptotic_ratio, boundary_inequality, efficiency_ratio, ghz_efficiency, optimal_w, w_filtered,
    w_trajectory, GhzScenario, WScenario,
};
use crate::oracle::{run_validation, ValidationConfig};

pub(super) fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub(super) fn columns(p: Protocol) -> &'static [&'static str] {
    match p {
        Protocol::BellTwocopy => &["P_w", "concurrence", "E_f", "status"],
        Protocol::BellBisection => &["P_w", "t", "E_s", "status"],
        Protocol::BellNonmax => &["P_w", "E_f", "status"],
        Protocol::Ghz => &["P_w", "E", "status"],
        Protocol::WState => &["F_w", "p_w", "m", "F_m", "E", "status"],
        Protocol::WRatio => &["m", "m_ref", "E", "E_ref", "R", "boundary_le_1", "status"],
        Protocol::WAsymptotic => &["R_asym", "status"],
        Protocol::OptimalW => &["w_opt", "E_opt", "m_opt", "E_w0", "m_w0", "status"],
        Protocol::Validate => &[
            "suite",
            "case",
            "quantity",
            "closed_form",
            "simulated",
            "abs_error",
            "tolerance",
            "pass",
        ],
    }
}

/// Fixed parameters overridden by the axis values of one grid point.
struct Point {
    parties: usize,
    d1: f64,
    d2: f64,
    w1: f64,
    w2: f64,
}

impl Point {
    fn resolve(fixed: &FixedParams, axes: &[Axis], values: &[f64]) -> Self {
        let mut p = Point {
            parties: fixed.parties,
            d1: fixed.d1,
            d2: fixed.d2,
            w1: fixed.w1,
            w2: fixed.w2,
        };
        for (a, &v) in axes.iter().zip(values) {
            match a.param {
                Param::D => (p.d1, p.d2) = (v, v),
                Param::W => (p.w1, p.w2) = (v, v),
                Param::D1 => p.d1 = v,
                Param::D2 => p.d2 = v,
                Param::W1 => p.w1 = v,
                Param::W2 => p.w2 = v,
                Param::N => p.parties = v as usize,
            }
        }
        p
    }

    fn d(&self) -> Result<AdParams> {
        AdParams::new(self.d1)
    }

    fn w(&self) -> Result<NrwmParams> {
        NrwmParams::new(self.w1)
    }
}

pub(super) fn evaluate(
    protocol: Protocol,
    fixed: &FixedParams,
    axes: &[Axis],
    values: &[f64],
) -> Vec<String> {
    let p = Point::resolve(fixed, axes, values);
    let width = columns(protocol).len() - 1;
    let mut row = match compute(protocol, fixed, &p) {
        Ok(cells) => {
            let mut cells = cells;
            cells.push("ok".to_string());
            cells
        }
        Err(e) => {
            let mut cells = vec![String::new(); width];
            cells.push(e.status_tag().to_string());
            cells
        }
    };
    if protocol == Protocol::WState && row[width] != "ok" {
        // the filtered state exists even where distillation does not
        if let Ok(f) = p.d().and_then(|d| w_filtered(p.parties, d, p.w()?)) {
            row[0] = num(f.fidelity);
            row[1] = num(f.probability);
        }
    }
    row
}

fn compute(protocol: Protocol, fixed: &FixedParams, p: &Point) -> Result<Vec<String>> {
    let eps = fixed.epsilon;
    Ok(match protocol {
        Protocol::BellTwocopy => {
            let s = BellScenario::new(p.d1, p.d2, p.w1, p.w2)?;
            let f = bell_filtered_state(&s);
            let e = two_copy_efficiency(&s, fixed.m)?;
            vec![num(f.p_w), num(f.concurrence), num(e.cumulative)]
        }
        Protocol::BellBisection => {
            let (d, w) = (p.d()?, p.w()?);
            let e = bisection_efficiency(d, w, fixed.n)?;
            let t = d.survival() / (d.d() * w.complement() + d.survival());
            vec![num(e.filter_probability), num(t), num(e.cumulative)]
        }
        Protocol::BellNonmax => {
            let e = nonmax_initial_pipeline(p.d()?, p.w()?, fixed.m)?;
            vec![num(e.filter_probability), num(e.cumulative)]
        }
        Protocol::Ghz => {
            let e = ghz_efficiency(&GhzScenario {
                d: p.d()?,
                w: p.w()?,
                rounds: fixed.m,
            })?;
            vec![num(e.filter_probability), num(e.cumulative)]
        }
        Protocol::WState => {
            let t = w_trajectory(&WScenario::new(p.parties, p.d1, p.w1, eps)?)?;
            vec![
                num(t.fidelities[0]),
                num(t.p_w),
                t.steps.to_string(),
                num(t.fidelities[t.steps]),
                num(t.efficiency),
            ]
        }
        Protocol::WRatio => {
            let (d, w) = (p.d()?, p.w()?);
            let r = efficiency_ratio(p.parties, d, w, eps)?;
            let y = p.parties as f64 * d.d() / d.survival();
            let le = boundary_inequality(p.parties, r.steps, r.reference_steps, w.complement(), y);
            vec![
                r.steps.to_string(),
                r.reference_steps.to_string(),
                num(r.efficiency),
                num(r.reference_efficiency),
                num(r.ratio),
                le.to_string(),
            ]
        }
        Protocol::WAsymptotic => vec![num(asymptotic_ratio(p.parties, p.d()?, p.w()?)?)],
        Protocol::OptimalW => {
            let d = p.d()?;
            let opt = optimal_w(p.parties, d, eps)?;
            let base = w_trajectory(&WScenario {
                parties: p.parties,
                d,
                w: NrwmParams::none(),
                epsilon: eps,
            })
            .ok();
            vec![
                num(opt.w),
                num(opt.efficiency),
                opt.steps.to_string(),
                base.as_ref().map_or(String::new(), |t| num(t.efficiency)),
                base.as_ref().map_or(String::new(), |t| t.steps.to_string()),
            ]
        }
        Protocol::Validate => unreachable!("validation is tabulated separately"),
    })
}

pub(super) fn validation_table(fixed: &FixedParams) -> Result<Table> {
    let report = run_validation(&ValidationConfig {
        seed: fixed.seed,
        samples: fixed.samples,
        parties: vec![fixed.parties],
        perturb: 0.0,
    })?;
    let rows = report
        .rows
        .into_iter()
        .map(|r| {
            vec![
                r.suite,
                r.case,
                r.report.quantity,
                num(r.report.closed_form),
                num(r.report.simulated),
                num(r.report.abs_error),
                num(r.report.tolerance),
                r.report.pass.to_string(),
            ]
        })
        .collect();
    Ok(Table {
        header: columns(Protocol::Validate)
            .iter()
            .map(|c| c.to_string())
            .collect(),
        rows,
    })
}
