//! Bipartite distribution: the damped and filtered Bell pair, the two-copy
//! recurrence protocol and the bisection protocol.
//!
//! The damped pair stays in the family
//! `(a|01> + b|10>)(a<01| + b<10|) + v|00><00|`, normalized by `v + a^2 + b^2`,
//! and the recurrence maps that family onto itself by squaring every
//! coefficient. Everything here is closed form; the circuit-level checks
//! live in [`crate::oracle`].

use serde::{Deserialize, Serialize};

use crate::channels::{filter_all, transmit, AdParams, NrwmParams};
use crate::error::{Error, Result};
use crate::qstate::{DensityMatrix, PureState};

/// Damping rates and filter strengths of the two halves of a Bell pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellScenario {
    pub d1: AdParams,
    pub d2: AdParams,
    pub w1: NrwmParams,
    pub w2: NrwmParams,
}

impl BellScenario {
    pub fn new(d1: f64, d2: f64, w1: f64, w2: f64) -> Result<Self> {
        Ok(Self {
            d1: AdParams::new(d1)?,
            d2: AdParams::new(d2)?,
            w1: NrwmParams::new(w1)?,
            w2: NrwmParams::new(w2)?,
        })
    }

    pub fn symmetric(d: f64, w: f64) -> Result<Self> {
        Self::new(d, d, w, w)
    }
}

/// Unnormalized coefficients of `(a|01> + b|10>)(h.c.) + v|00><00|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoCopyRoundParams {
    pub amp01: f64,
    pub amp10: f64,
    pub vac: f64,
}

impl TwoCopyRoundParams {
    pub fn new(amp01: f64, amp10: f64, vac: f64) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if !(ok(amp01) && ok(amp10) && ok(vac)) {
            return Err(Error::arg(
                "two-copy coefficients must be finite and nonnegative",
            ));
        }
        if amp01 == 0.0 && amp10 == 0.0 && vac == 0.0 {
            return Err(Error::arg("two-copy coefficients are all zero"));
        }
        Ok(Self { amp01, amp10, vac })
    }

    pub fn normalization(&self) -> f64 {
        self.vac + self.amp01 * self.amp01 + self.amp10 * self.amp10
    }

    /// Same state, rescaled so that the normalization constant is 1.
    pub fn normalized(&self) -> Self {
        let n = self.normalization();
        Self {
            amp01: self.amp01 / n.sqrt(),
            amp10: self.amp10 / n.sqrt(),
            vac: self.vac / n,
        }
    }

    /// Unit-trace two-qubit density matrix.
    pub fn to_density(&self) -> DensityMatrix {
        let p = self.normalized();
        DensityMatrix::from_real_fn(2, |i, j| match (i, j) {
            (0b00, 0b00) => p.vac,
            (0b01, 0b01) => p.amp01 * p.amp01,
            (0b10, 0b10) => p.amp10 * p.amp10,
            (0b01, 0b10) | (0b10, 0b01) => p.amp01 * p.amp10,
            _ => 0.0,
        })
        .expect("two-copy family is a valid state")
    }
}

/// Branch data of one round of the two-copy protocol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoCopyRound {
    /// Probability of the `11` outcome, which leaves a perfect Bell pair.
    pub p_success: f64,
    /// Probability of the `00` outcome, whose control pair is recycled.
    pub p_recycle: f64,
    /// Normalized state of the recycled control pair.
    pub next: TwoCopyRoundParams,
}

pub fn two_copy_round(p: &TwoCopyRoundParams) -> Result<TwoCopyRound> {
    let p = TwoCopyRoundParams::new(p.amp01, p.amp10, p.vac)?.normalized();
    let (a2, b2) = (p.amp01 * p.amp01, p.amp10 * p.amp10);
    let p_success = 2.0 * a2 * b2;
    let p_recycle = a2 * a2 + b2 * b2 + p.vac * p.vac;
    let next = TwoCopyRoundParams {
        amp01: a2 / p_recycle.sqrt(),
        amp10: b2 / p_recycle.sqrt(),
        vac: p.vac * p.vac / p_recycle,
    };
    Ok(TwoCopyRound {
        p_success,
        p_recycle,
        next,
    })
}

/// Yield bookkeeping for one protocol run.
///
/// `per_round_yields` already include the filtering success probability, so
/// `cumulative` is the end-to-end efficiency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    pub per_round_yields: Vec<f64>,
    pub cumulative: f64,
    pub rounds: usize,
    pub filter_probability: f64,
}

impl EfficiencyReport {
    pub(crate) fn from_distillation_yields(filter_probability: f64, yields: &[f64]) -> Self {
        let per_round_yields: Vec<f64> = yields.iter().map(|y| filter_probability * y).collect();
        Self {
            cumulative: per_round_yields.iter().sum(),
            rounds: per_round_yields.len(),
            per_round_yields,
            filter_probability,
        }
    }
}

/// Per-round yields of a recurrence whose kept state is a coherent pair with
/// diagonal weights `pair` plus incoherent diagonal `noise` weights. Each
/// round consumes two copies: the success branch (coherent cross term) gives
/// `2 pa pb`, the recycle branch squares every weight.
///
/// Yields are per input copy. Weights are renormalized every round so that
/// long runs do not underflow.
pub(crate) fn recurrence_yields(pair: (f64, f64), noise: &[f64], rounds: usize) -> Vec<f64> {
    let (mut pa, mut pb) = pair;
    let mut noise = noise.to_vec();
    let mut surviving = 1.0;
    let mut yields = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        let total = pa + pb + noise.iter().sum::<f64>();
        pa /= total;
        pb /= total;
        noise.iter_mut().for_each(|v| *v /= total);
        let success = 2.0 * pa * pb;
        let recycle = pa * pa + pb * pb + noise.iter().map(|v| v * v).sum::<f64>();
        yields.push(surviving * success / 2.0);
        surviving *= recycle / 2.0;
        pa *= pa;
        pb *= pb;
        noise.iter_mut().for_each(|v| *v *= *v);
    }
    yields
}

/// Filtered Bell pair: coefficients, success probability `P_w`, concurrence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellFiltered {
    pub params: TwoCopyRoundParams,
    pub p_w: f64,
    pub concurrence: f64,
}

pub fn bell_filtered_state(s: &BellScenario) -> BellFiltered {
    let (db1, db2) = (s.d1.survival(), s.d2.survival());
    let (wb1, wb2) = (s.w1.complement(), s.w2.complement());
    let params = TwoCopyRoundParams {
        amp01: (db2 * wb1).sqrt(),
        amp10: (db1 * wb2).sqrt(),
        vac: (s.d1.d() + s.d2.d()) * wb1 * wb2,
    };
    let p_w = 0.5 * params.normalization();
    BellFiltered {
        params,
        p_w,
        concurrence: (db1 * db2 * wb1 * wb2).sqrt() / p_w,
    }
}

/// Damped Bell pair written out from its closed form.
pub fn decohered_bell_state(d1: AdParams, d2: AdParams) -> DensityMatrix {
    let s = BellScenario {
        d1,
        d2,
        w1: NrwmParams::none(),
        w2: NrwmParams::none(),
    };
    bell_filtered_state(&s).params.to_density()
}

fn check_rounds(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::arg("at least one distillation round is required"));
    }
    Ok(())
}

fn two_copy_from_params(p: &TwoCopyRoundParams, p_w: f64, m: usize) -> Result<EfficiencyReport> {
    check_rounds(m)?;
    let p = TwoCopyRoundParams::new(p.amp01, p.amp10, p.vac)?;
    let yields = recurrence_yields((p.amp01 * p.amp01, p.amp10 * p.amp10), &[p.vac], m);
    Ok(EfficiencyReport::from_distillation_yields(p_w, &yields))
}

/// Two-copy protocol over `m` rounds with `00` recycling, including the
/// filtering stage.
pub fn two_copy_efficiency(s: &BellScenario, m: usize) -> Result<EfficiencyReport> {
    let f = bell_filtered_state(s);
    two_copy_from_params(&f.params, f.p_w, m)
}

/// Filtered pair obtained from the nonmaximally entangled input when only
/// the first qubit is damped, computed on the density-matrix engine.
///
/// Returns the extracted coefficients and the filter success probability.
pub fn nonmax_filtered_params(d: AdParams, w: NrwmParams) -> Result<(TwoCopyRoundParams, f64)> {
    let input = PureState::nonmax_psi(d.d())?.to_density();
    let damped = transmit(&input, &[d, AdParams::new(0.0)?])?;
    let (state, p_w) = filter_all(&damped, &[w, w])?;
    let state = state.ok_or_else(|| Error::Domain("filter never succeeds".into()))?;
    let entry = |i, j| state.entry(i, j).re;
    let params = TwoCopyRoundParams::new(
        entry(0b01, 0b01).max(0.0).sqrt(),
        entry(0b10, 0b10).max(0.0).sqrt(),
        entry(0b00, 0b00).max(0.0),
    )?;
    // anything outside the two-copy family would make the recursion meaningless
    let residual = state.max_abs_diff(&params.to_density());
    if residual > 1e-12 {
        return Err(Error::Domain(format!(
            "filtered state leaves the two-copy family (residual {residual:e})"
        )));
    }
    Ok((params, p_w))
}

/// Two-copy protocol fed by `|psi'>` with only the first qubit damped.
pub fn nonmax_initial_pipeline(d: AdParams, w: NrwmParams, m: usize) -> Result<EfficiencyReport> {
    let (params, p_w) = nonmax_filtered_params(d, w)?;
    two_copy_from_params(&params, p_w, m)
}

/// Exact binomial coefficient; `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Largest block size for which binomials are evaluated exactly.
pub const MAX_BISECTION_COPIES: usize = 64;

/// Joint Hamming-weight outcome of the first bisection round.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BisectionOutcome {
    /// Number of string patterns `C(n, a+b) C(a+b, a)`.
    pub pattern_count: u128,
    pub probability: f64,
    /// Schmidt rank `C(n, a)` when the outcome leaves a maximally entangled
    /// state (`a + b = n`).
    pub rank: Option<u128>,
}

fn check_copies(n: usize) -> Result<()> {
    if n == 0 || !n.is_power_of_two() || n > MAX_BISECTION_COPIES {
        return Err(Error::arg(format!(
            "copy count {n} must be a power of two no larger than {MAX_BISECTION_COPIES}"
        )));
    }
    Ok(())
}

pub fn bisection_outcome_stats(n: usize, t: f64, a: usize, b: usize) -> Result<BisectionOutcome> {
    check_copies(n)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::arg(format!("weight t={t} outside [0,1]")));
    }
    if a + b > n {
        return Err(Error::arg(format!("a + b = {} exceeds n = {n}", a + b)));
    }
    let (n64, k) = (n as u64, (a + b) as u64);
    let pattern_count = binomial(n64, k).unwrap() * binomial(k, a as u64).unwrap();
    let probability = 0.5f64.powi(k as i32)
        * t.powi(k as i32)
        * (1.0 - t).powi((n64 - k) as i32)
        * pattern_count as f64;
    let rank = (a + b == n).then(|| binomial(n64, a as u64).unwrap());
    Ok(BisectionOutcome {
        pattern_count,
        probability,
        rank,
    })
}

/// `H(x) = (1 / (x 2^x)) sum_l C(x,l) log2 C(x,l)`, the average number of
/// Bell pairs per copy recovered from a block of `x` perfect pairs.
pub fn hamming_yield(x: usize) -> Result<f64> {
    if x == 0 || x > MAX_BISECTION_COPIES {
        return Err(Error::arg(format!(
            "block size {x} outside 1..={MAX_BISECTION_COPIES}"
        )));
    }
    let sum: f64 = (0..=x as u64)
        .map(|l| {
            let c = binomial(x as u64, l).unwrap();
            c as f64 * (c as f64).log2()
        })
        .sum();
    Ok(sum / (x as f64 * 2f64.powi(x as i32)))
}

/// Weight of `|psi><psi|` in the symmetric filtered pair:
/// `t = (1-d) / (d(1-w) + 1-d)`.
pub fn bisection_weight(d: AdParams, w: NrwmParams) -> f64 {
    d.survival() / (d.d() * w.complement() + d.survival())
}

/// Bisection protocol on `n` copies of the symmetric filtered pair,
/// including the filtering stage.
pub fn bisection_efficiency(d: AdParams, w: NrwmParams, n: usize) -> Result<EfficiencyReport> {
    check_copies(n)?;
    if n < 2 {
        return Err(Error::arg("bisection needs at least two copies"));
    }
    let t = bisection_weight(d, w);
    let p_w = bell_filtered_state(&BellScenario {
        d1: d,
        d2: d,
        w1: w,
        w2: w,
    })
    .p_w;
    let levels = n.trailing_zeros() as usize;
    let mut yields = Vec::with_capacity(levels);
    for k in 1..=levels {
        let block = 1usize << k;
        let gain = hamming_yield(block)? - hamming_yield(block / 2)?;
        yields.push(t.powi(block as i32) * gain);
    }
    Ok(EfficiencyReport::from_distillation_yields(p_w, &yields))
}
