//! Brute-force replay of every protocol on explicit density matrices:
//! transmit, filter, bilateral CNOT, measure, post-select. Each closed form is
//! compared against the simulated value and reported, never asserted, so a
//! whole suite can be inspected at once.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::{
    bell_filtered_state, decohered_bell_state, two_copy_efficiency, two_copy_round, BellScenario,
    TwoCopyRoundParams,
};
use crate::channels::{filter_all, transmit, AdParams, NrwmParams};
use crate::error::{Error, Result};
use crate::multipartite::{ghz_noisy_and_filtered, ghz_round, w_filtered, w_round};
use crate::qstate::{DensityMatrix, MeasurementBranch, PureState};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_SEED: u64 = 0x5eed_2024;
pub const DEFAULT_SAMPLES: usize = 50;
/// Largest W state replayed: two copies make a `2N`-qubit register.
pub const MAX_W_PARTIES: usize = 5;
/// Random parameters are drawn from `[0, PARAM_MAX)`.
const PARAM_MAX: f64 = 0.95;

/// One closed-form value against its simulated counterpart. For matrices the
/// two value columns hold the largest entry magnitude of each side and
/// `abs_error` is the largest entrywise difference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub quantity: String,
    pub closed_form: f64,
    pub simulated: f64,
    pub abs_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleReport {
    pub fn scalar(quantity: impl Into<String>, closed_form: f64, simulated: f64) -> Self {
        Self::finish(
            quantity,
            closed_form,
            simulated,
            (closed_form - simulated).abs(),
        )
    }

    pub fn matrix(
        quantity: impl Into<String>,
        closed_form: &DensityMatrix,
        simulated: &DensityMatrix,
    ) -> Self {
        let peak = |m: &DensityMatrix| m.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let err = if closed_form.dim() == simulated.dim() {
            closed_form.max_abs_diff(simulated)
        } else {
            f64::INFINITY
        };
        Self::finish(quantity, peak(closed_form), peak(simulated), err)
    }

    fn finish(
        quantity: impl Into<String>,
        closed_form: f64,
        simulated: f64,
        abs_error: f64,
    ) -> Self {
        Self {
            quantity: quantity.into(),
            closed_form,
            simulated,
            abs_error,
            tolerance: DEFAULT_TOLERANCE,
            // NaN must fail
            pass: abs_error < DEFAULT_TOLERANCE,
        }
    }

    /// Shifts the closed-form side by `delta`; only used to check that the
    /// harness notices a wrong formula.
    pub fn perturbed(mut self, delta: f64) -> Self {
        self.closed_form += delta;
        self.abs_error += delta.abs();
        self.pass = self.abs_error < self.tolerance;
        self
    }
}

fn branch<'a>(branches: &'a [MeasurementBranch], label: &str) -> Option<&'a MeasurementBranch> {
    branches.iter().find(|b| b.label() == label)
}

fn branch_probability(branches: &[MeasurementBranch], label: &str) -> f64 {
    branch(branches, label).map_or(0.0, |b| b.probability)
}

/// Reports a post-selected state, or an infinite error if the branch never
/// occurred although the closed form says it should.
fn branch_state(
    out: &mut Vec<OracleReport>,
    quantity: &str,
    branches: &[MeasurementBranch],
    label: &str,
    expected: &DensityMatrix,
) {
    match branch(branches, label) {
        Some(b) => out.push(OracleReport::matrix(quantity, expected, &b.state)),
        None => out.push(OracleReport::finish(quantity, 1.0, 0.0, f64::INFINITY)),
    }
}

/// Two copies of `rho` side by side with a CNOT from every qubit of the first
/// copy to its partner in the second; returns the branches of measuring the
/// second copy.
fn bilateral_round(rho: &DensityMatrix) -> Result<Vec<MeasurementBranch>> {
    let n = rho.qubits();
    let mut pair = rho.tensor(rho)?;
    for q in 0..n {
        pair = pair.apply_cnot(q, n + q)?;
    }
    let targets: Vec<usize> = (n..2 * n).collect();
    pair.measure_computational(&targets)
}

fn total_probability(branches: &[MeasurementBranch]) -> f64 {
    branches.iter().map(|b| b.probability).sum()
}

/// Damped and filtered Bell pair: matrices, filter probability, concurrences.
pub fn validate_bell_filter(s: &BellScenario) -> Result<Vec<OracleReport>> {
    let closed = bell_filtered_state(s);
    let damped = transmit(&PureState::bell_psi().to_density(), &[s.d1, s.d2])?;
    let mut out = vec![
        OracleReport::matrix("rho_d", &decohered_bell_state(s.d1, s.d2), &damped),
        OracleReport::scalar(
            "concurrence(rho_d)",
            (s.d1.survival() * s.d2.survival()).sqrt(),
            damped.concurrence()?,
        ),
    ];
    let (filtered, p_w) = filter_all(&damped, &[s.w1, s.w2])?;
    out.push(OracleReport::scalar("P_w", closed.p_w, p_w));
    let filtered = filtered.ok_or_else(|| Error::Domain("Bell filter never succeeds".into()))?;
    out.push(OracleReport::matrix(
        "rho_w",
        &closed.params.to_density(),
        &filtered,
    ));
    out.push(OracleReport::scalar(
        "concurrence(rho_w)",
        closed.concurrence,
        filtered.concurrence()?,
    ));
    Ok(out)
}

/// One two-copy round on `A1 B1 A2 B2` with the second pair measured.
pub fn validate_two_copy_round(params: &TwoCopyRoundParams) -> Result<Vec<OracleReport>> {
    let closed = two_copy_round(params)?;
    let branches = bilateral_round(&params.to_density())?;
    let p11 = branch_probability(&branches, "11");
    let p00 = branch_probability(&branches, "00");
    let mut out = vec![
        OracleReport::scalar("P('11')", closed.p_success, p11),
        OracleReport::scalar("P('00')", closed.p_recycle, p00),
        OracleReport::scalar(
            "P(discard)",
            1.0 - closed.p_success - closed.p_recycle,
            total_probability(&branches) - p11 - p00,
        ),
    ];
    if closed.p_success > 0.0 {
        branch_state(
            &mut out,
            "state('11')",
            &branches,
            "11",
            &PureState::bell_psi().to_density(),
        );
    }
    branch_state(
        &mut out,
        "state('00')",
        &branches,
        "00",
        &closed.next.to_density(),
    );
    Ok(out)
}

/// Several rounds of the two-copy protocol, feeding each round with the
/// simulated recycled pair; per-round yields and recycled states are compared
/// with the closed-form recursion.
pub fn validate_two_copy_rounds(s: &BellScenario, rounds: usize) -> Result<Vec<OracleReport>> {
    let report = two_copy_efficiency(s, rounds)?;
    let damped = transmit(&PureState::bell_psi().to_density(), &[s.d1, s.d2])?;
    let (state, p_w) = filter_all(&damped, &[s.w1, s.w2])?;
    let mut state = state.ok_or_else(|| Error::Domain("Bell filter never succeeds".into()))?;
    let mut params = bell_filtered_state(s).params.normalized();
    let mut surviving = p_w;
    let mut out = Vec::with_capacity(2 * rounds);
    for (r, closed_yield) in report.per_round_yields.iter().enumerate() {
        let branches = bilateral_round(&state)?;
        out.push(OracleReport::scalar(
            format!("Y_{}", r + 1),
            *closed_yield,
            surviving * branch_probability(&branches, "11") / 2.0,
        ));
        surviving *= branch_probability(&branches, "00") / 2.0;
        params = two_copy_round(&params)?.next;
        if r + 1 == rounds {
            break;
        }
        match branch(&branches, "00") {
            Some(b) => {
                out.push(OracleReport::matrix(
                    format!("recycled_{}", r + 1),
                    &params.to_density(),
                    &b.state,
                ));
                state = b.state.clone();
            }
            None => break,
        }
    }
    Ok(out)
}

/// Damped and filtered GHZ state and one round of its two-copy protocol on a
/// six-qubit register.
pub fn validate_ghz_round(d: AdParams, w: NrwmParams) -> Result<Vec<OracleReport>> {
    let ghz = PureState::ghz3();
    let damped = transmit(&ghz.to_density(), &[d; 3])?;
    let (unfiltered, _) = ghz_noisy_and_filtered(d, NrwmParams::none());
    let (coeffs, p_w) = ghz_noisy_and_filtered(d, w);
    let mut out = vec![OracleReport::matrix(
        "rho'_d",
        &unfiltered.to_density(),
        &damped,
    )];

    let (filtered, p_sim) = filter_all(&damped, &[w; 3])?;
    out.push(OracleReport::scalar("P'_w", p_w, p_sim));
    let filtered = filtered.ok_or_else(|| Error::Domain("GHZ filter never succeeds".into()))?;
    out.push(OracleReport::matrix(
        "rho'_w",
        &coeffs.to_density(),
        &filtered,
    ));

    let closed = ghz_round(&coeffs);
    let branches = bilateral_round(&filtered)?;
    let p111 = branch_probability(&branches, "111");
    let p000 = branch_probability(&branches, "000");
    let (db, wb) = (d.survival(), w.complement());
    out.extend([
        OracleReport::scalar("P('111')", closed.p_success, p111),
        OracleReport::scalar(
            "Y_1",
            db.powi(3) * wb.powi(3) / (4.0 * p_w * p_w),
            p111 / 2.0,
        ),
        OracleReport::scalar("P('000')", closed.p_recycle, p000),
        OracleReport::scalar(
            "P(discard)",
            1.0 - closed.p_success - closed.p_recycle,
            total_probability(&branches) - p111 - p000,
        ),
    ]);
    branch_state(
        &mut out,
        "state('111')",
        &branches,
        "111",
        &ghz.to_density(),
    );
    branch_state(
        &mut out,
        "state('000')",
        &branches,
        "000",
        &closed.next.to_density(),
    );
    Ok(out)
}

/// `F |W><W| + (1-F) |0..0><0..0|`.
fn w_two_term(parties: usize, fidelity: f64) -> Result<DensityMatrix> {
    let w = PureState::w_state(parties)?.to_density();
    let vac = DensityMatrix::basis_projector(parties, 0)?;
    DensityMatrix::from_real_fn(parties, |i, j| {
        fidelity * w.entry(i, j).re + (1.0 - fidelity) * vac.entry(i, j).re
    })
}

/// Damped and filtered W state and one recurrence step on `2N` qubits.
pub fn validate_w_round(parties: usize, d: AdParams, w: NrwmParams) -> Result<Vec<OracleReport>> {
    if parties > MAX_W_PARTIES {
        return Err(Error::Config(format!(
            "W-state replay is capped at N={MAX_W_PARTIES} ({} qubits), got N={parties}",
            2 * MAX_W_PARTIES
        )));
    }
    let target = PureState::w_state(parties)?;
    let damped = transmit(&target.to_density(), &vec![d; parties])?;
    let mut out = vec![
        OracleReport::matrix("rho_d", &w_two_term(parties, d.survival())?, &damped),
        OracleReport::scalar("F", d.survival(), damped.fidelity_with_pure(&target)?),
    ];

    let closed = w_filtered(parties, d, w)?;
    let (filtered, p_sim) = filter_all(&damped, &vec![w; parties])?;
    out.push(OracleReport::scalar("p_w", closed.probability, p_sim));
    let filtered = filtered.ok_or_else(|| Error::Domain("W filter never succeeds".into()))?;
    out.push(OracleReport::scalar(
        "F_w",
        closed.fidelity,
        filtered.fidelity_with_pure(&target)?,
    ));
    out.push(OracleReport::matrix(
        "rho_w",
        &w_two_term(parties, closed.fidelity)?,
        &filtered,
    ));

    let step = w_round(parties, closed.fidelity)?;
    let branches = bilateral_round(&filtered)?;
    let zeros = "0".repeat(parties);
    let kept = branch(&branches, &zeros)
        .ok_or_else(|| Error::Domain("all-zeros outcome never occurs".into()))?;
    out.extend([
        OracleReport::scalar("p_1", step.probability, kept.probability),
        OracleReport::scalar(
            "F_1",
            step.fidelity,
            kept.state.fidelity_with_pure(&target)?,
        ),
        OracleReport::matrix("rho_1", &w_two_term(parties, step.fidelity)?, &kept.state),
        OracleReport::scalar(
            "P(discard)",
            1.0 - step.probability,
            total_probability(&branches) - kept.probability,
        ),
    ]);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationConfig {
    pub seed: u64,
    pub samples: usize,
    /// W-state sizes to replay.
    pub parties: Vec<usize>,
    /// Shift added to every closed form; non-zero only in harness self-tests.
    #[serde(default)]
    pub perturb: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
            parties: vec![3, 4, 5],
            perturb: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub suite: String,
    pub case: String,
    #[serde(flatten)]
    pub report: OracleReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub config: ValidationConfig,
    pub rows: Vec<ValidationRow>,
    pub failures: usize,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn write_json(&self, path: &std::path::Path) -> Result<()> {
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        std::fs::write(path, json)?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum Case {
    Bell(BellScenario),
    Ghz(AdParams, NrwmParams),
    W(usize, AdParams, NrwmParams),
}

impl Case {
    fn run(&self) -> Result<Vec<(String, String, Vec<OracleReport>)>> {
        Ok(match self {
            Case::Bell(s) => {
                let label = format!(
                    "d1={} d2={} w1={} w2={}",
                    s.d1.d(),
                    s.d2.d(),
                    s.w1.w(),
                    s.w2.w()
                );
                vec![
                    (
                        "bell-filter".into(),
                        label.clone(),
                        validate_bell_filter(s)?,
                    ),
                    (
                        "bell-twocopy".into(),
                        label.clone(),
                        validate_two_copy_round(&bell_filtered_state(s).params)?,
                    ),
                    (
                        "bell-twocopy-rounds".into(),
                        label,
                        validate_two_copy_rounds(s, 3)?,
                    ),
                ]
            }
            Case::Ghz(d, w) => vec![(
                "ghz".into(),
                format!("d={} w={}", d.d(), w.w()),
                validate_ghz_round(*d, *w)?,
            )],
            Case::W(n, d, w) => vec![(
                "w-state".into(),
                format!("N={n} d={} w={}", d.d(), w.w()),
                validate_w_round(*n, *d, *w)?,
            )],
        })
    }
}

fn anchor_cases(parties: &[usize]) -> Result<Vec<Case>> {
    let mut cases = Vec::new();
    for (d1, d2, w1, w2) in [
        (0.5, 0.5, 0.0, 0.0),
        (0.3, 0.7, 0.2, 0.6),
        (0.5, 0.5, 0.5, 0.5),
        (0.0, 0.0, 0.0, 0.0),
    ] {
        cases.push(Case::Bell(BellScenario::new(d1, d2, w1, w2)?));
    }
    for (d, w) in [(0.0, 0.0), (0.5, 0.5)] {
        cases.push(Case::Ghz(AdParams::new(d)?, NrwmParams::new(w)?));
    }
    for &n in parties {
        for (d, w) in [(0.4, 0.5), (0.1, 0.0)] {
            cases.push(Case::W(n, AdParams::new(d)?, NrwmParams::new(w)?));
        }
    }
    Ok(cases)
}

/// Runs every suite on fixed anchor points plus `samples` seeded random
/// parameter sets. Cases are evaluated in parallel but reported in order.
pub fn run_validation(cfg: &ValidationConfig) -> Result<ValidationReport> {
    if cfg.samples == 0 {
        return Err(Error::Config("validation needs at least one sample".into()));
    }
    if let Some(&n) = cfg
        .parties
        .iter()
        .find(|&&n| !(2..=MAX_W_PARTIES).contains(&n))
    {
        return Err(Error::Config(format!(
            "W-state replay supports N in 2..={MAX_W_PARTIES}, got N={n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut draw = || rng.gen_range(0.0..PARAM_MAX);
    let mut cases = anchor_cases(&cfg.parties)?;
    for _ in 0..cfg.samples {
        let (d1, d2, w1, w2) = (draw(), draw(), draw(), draw());
        cases.push(Case::Bell(BellScenario::new(d1, d2, w1, w2)?));
        cases.push(Case::Ghz(AdParams::new(d1)?, NrwmParams::new(w1)?));
        for &n in &cfg.parties {
            cases.push(Case::W(n, AdParams::new(d2)?, NrwmParams::new(w2)?));
        }
    }
    let results: Vec<_> = cases.par_iter().map(Case::run).collect::<Result<_>>()?;
    let rows: Vec<ValidationRow> = results
        .into_iter()
        .flatten()
        .flat_map(|(suite, case, reports)| {
            reports.into_iter().map(move |r| ValidationRow {
                suite: suite.clone(),
                case: case.clone(),
                report: if cfg.perturb != 0.0 {
                    r.perturbed(cfg.perturb)
                } else {
                    r
                },
            })
        })
        .collect();
    let failures = rows.iter().filter(|r| !r.report.pass).count();
    Ok(ValidationReport {
        config: cfg.clone(),
        rows,
        failures,
    })
}
