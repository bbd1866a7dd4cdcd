//! N-qubit W states: the filtered noisy state, the recurrence step, the step
//! count needed to reach a target fidelity, and the resulting efficiencies.
//!
//! Uniform damping leaves `(1-d)|W><W| + d|0..0><0..0|`; uniform filtering only
//! rescales the two weights. Writing the fidelity as `F = 1/(1+lambda)` turns
//! the recurrence into `lambda -> N lambda^2`, which is what everything below
//! iterates.

use serde::{Deserialize, Serialize};

use crate::channels::{AdParams, NrwmParams};
use crate::error::{Error, Result};
use crate::numeric::golden_section_max;

pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Coarse grid spacing used by [`optimal_w`].
const OPT_GRID: f64 = 1e-3;
const OPT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WScenario {
    pub parties: usize,
    pub d: AdParams,
    pub w: NrwmParams,
    pub epsilon: f64,
}

impl WScenario {
    pub fn new(parties: usize, d: f64, w: f64, epsilon: f64) -> Result<Self> {
        check_parties(parties)?;
        check_epsilon(epsilon)?;
        Ok(Self {
            parties,
            d: AdParams::new(d)?,
            w: NrwmParams::new(w)?,
            epsilon,
        })
    }
}

fn check_parties(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::arg(format!(
            "a W state needs at least 2 parties, got {n}"
        )));
    }
    Ok(())
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::arg(format!("target infidelity {eps} outside (0,1)")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WFiltered {
    pub fidelity: f64,
    pub probability: f64,
}

pub fn w_filtered(parties: usize, d: AdParams, w: NrwmParams) -> Result<WFiltered> {
    check_parties(parties)?;
    let (dv, db, wb) = (d.d(), d.survival(), w.complement());
    Ok(WFiltered {
        fidelity: db / (dv * wb + db),
        probability: wb.powi(parties as i32 - 1) * (db + dv * wb),
    })
}

/// Outcome of one recurrence step: kept-copy fidelity and the probability of
/// the all-zeros outcome.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WRound {
    pub fidelity: f64,
    pub probability: f64,
}

pub fn w_round(parties: usize, fidelity: f64) -> Result<WRound> {
    check_parties(parties)?;
    if !(fidelity > 0.0 && fidelity <= 1.0) {
        return Err(Error::arg(format!("fidelity {fidelity} outside (0,1]")));
    }
    let n = parties as f64;
    let (f2, g2) = (fidelity * fidelity, (1.0 - fidelity) * (1.0 - fidelity));
    Ok(WRound {
        fidelity: f2 / (f2 + n * g2),
        probability: f2 / n + g2,
    })
}

/// Smallest filter strength that lets one step improve the fidelity; zero
/// whenever `d < 1/(N+1)`.
pub fn w_threshold_strength(parties: usize, d: AdParams) -> f64 {
    let (n, dv) = (parties as f64, d.d());
    if dv == 0.0 {
        return 0.0;
    }
    (((n + 1.0) * dv - 1.0) / (n * dv)).max(0.0)
}

fn lambda0(d: AdParams, w: NrwmParams) -> f64 {
    w.complement() * d.d() / d.survival()
}

/// Minimal number of steps taking `F = 1/(1+lambda0)` to at least `1 - eps`.
///
/// Uses the closed-form logarithm and then nudges the answer against the
/// exact squaring chain, so float rounding near a region boundary cannot
/// return a non-minimal count. `None` when the recurrence cannot converge.
pub fn required_steps(parties: usize, lambda0: f64, eps: f64) -> Result<Option<usize>> {
    check_parties(parties)?;
    check_epsilon(eps)?;
    let n = parties as f64;
    let z = n * lambda0;
    if z >= 1.0 || z.is_nan() {
        return Ok(None);
    }
    let c = n * eps / (1.0 - eps);
    let reached = |m: usize| chain(z, m) <= c;
    if reached(0) {
        return Ok(Some(0));
    }
    let mut m = (c.ln() / z.ln()).log2().ceil().max(1.0) as usize;
    while !reached(m) {
        m += 1;
    }
    while m > 1 && reached(m - 1) {
        m -= 1;
    }
    Ok(Some(m))
}

/// `z^(2^m)` by repeated squaring.
fn chain(z: f64, m: usize) -> f64 {
    (0..m).fold(z, |acc, _| acc * acc)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WTrajectory {
    pub lambdas: Vec<f64>,
    /// `F_w, F_1, ..., F_m`.
    pub fidelities: Vec<f64>,
    pub step_probs: Vec<f64>,
    pub p_w: f64,
    pub efficiency: f64,
    pub steps: usize,
}

pub fn w_trajectory(s: &WScenario) -> Result<WTrajectory> {
    let n = s.parties;
    let l0 = lambda0(s.d, s.w);
    let steps = required_steps(n, l0, s.epsilon)?.ok_or(Error::NotDistillable {
        parties: n,
        d: s.d.d(),
        w: s.w.w(),
        threshold: w_threshold_strength(n, s.d),
    })?;
    let filtered = w_filtered(n, s.d, s.w)?;

    let mut lambdas = Vec::with_capacity(steps + 1);
    lambdas.push(l0);
    for i in 0..steps {
        let l = lambdas[i];
        lambdas.push(n as f64 * l * l);
    }
    let fidelities: Vec<f64> = lambdas.iter().map(|l| 1.0 / (1.0 + l)).collect();
    let step_probs = fidelities[..steps]
        .iter()
        .map(|&f| w_round(n, f).map(|r| r.probability))
        .collect::<Result<Vec<_>>>()?;
    let efficiency = step_probs
        .iter()
        .fold(filtered.probability, |e, p| e * p / 2.0);
    Ok(WTrajectory {
        lambdas,
        fidelities,
        step_probs,
        p_w: filtered.probability,
        efficiency,
        steps,
    })
}

/// Filtered scheme against the unfiltered one, each run for its own minimal
/// number of steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub ratio: f64,
    pub steps: usize,
    pub reference_steps: usize,
    pub efficiency: f64,
    pub reference_efficiency: f64,
}

pub fn efficiency_ratio(
    parties: usize,
    d: AdParams,
    w: NrwmParams,
    eps: f64,
) -> Result<RatioReport> {
    let reference = match w_trajectory(&WScenario {
        parties,
        d,
        w: NrwmParams::none(),
        epsilon: eps,
    }) {
        Err(Error::NotDistillable { .. }) => {
            return Err(Error::RatioUndefined { parties, d: d.d() })
        }
        other => other?,
    };
    let filtered = w_trajectory(&WScenario {
        parties,
        d,
        w,
        epsilon: eps,
    })?;
    Ok(RatioReport {
        ratio: filtered.efficiency / reference.efficiency,
        steps: filtered.steps,
        reference_steps: reference.steps,
        efficiency: filtered.efficiency,
        reference_efficiency: reference.efficiency,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalW {
    pub w: f64,
    pub efficiency: f64,
    pub steps: usize,
}

/// Filter strength maximizing the end-to-end efficiency: a `1e-3` grid over
/// `[0, 1)` followed by golden-section refinement around the best grid point.
/// Ties go to the smaller strength.
pub fn optimal_w(parties: usize, d: AdParams, eps: f64) -> Result<OptimalW> {
    check_parties(parties)?;
    check_epsilon(eps)?;
    let eval = |w: f64| -> Option<WTrajectory> {
        let w = NrwmParams::new(w).ok()?;
        w_trajectory(&WScenario {
            parties,
            d,
            w,
            epsilon: eps,
        })
        .ok()
    };
    let grid_points = (1.0 / OPT_GRID).round() as usize;
    let mut best: Option<(f64, f64)> = None;
    for k in 0..grid_points {
        let w = k as f64 * OPT_GRID;
        if let Some(t) = eval(w) {
            if best.is_none_or(|(_, e)| t.efficiency > e) {
                best = Some((w, t.efficiency));
            }
        }
    }
    let (mut w_best, mut e_best) = best.ok_or(Error::NotDistillable {
        parties,
        d: d.d(),
        w: 1.0 - OPT_GRID,
        threshold: w_threshold_strength(parties, d),
    })?;

    let lo = (w_best - OPT_GRID).max(0.0);
    let hi = (w_best + OPT_GRID).min(1.0);
    let refined = golden_section_max(
        |w| eval(w).map_or(f64::NEG_INFINITY, |t| t.efficiency),
        lo,
        hi,
        OPT_TOL,
    );
    if refined.value > e_best {
        w_best = refined.x;
        e_best = refined.value;
    }
    let steps = eval(w_best).map(|t| t.steps).unwrap_or_default();
    Ok(OptimalW {
        w: w_best,
        efficiency: e_best,
        steps,
    })
}
