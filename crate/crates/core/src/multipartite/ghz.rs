//! Damped and filtered `(|001> + |110>)/sqrt(2)` and its two-copy protocol.
//!
//! Uniform damping leaves the state diagonal on `|000>, |010>, |100>` plus a
//! coherent block on `{|001>, |110>}`. The filter multiplies every `|0>`
//! (and `<0|`) by `sqrt(1-w)`, and the `000`-recycled control copy squares
//! every coefficient, so the family is closed under the recurrence.

use serde::{Deserialize, Serialize};

use crate::bell::{recurrence_yields, EfficiencyReport};
use crate::channels::{AdParams, NrwmParams};
use crate::error::{Error, Result};
use crate::qstate::DensityMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhzScenario {
    pub d: AdParams,
    pub w: NrwmParams,
    pub rounds: usize,
}

/// Unit-trace coefficients of the damped (and filtered) GHZ state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhzCoefficients {
    pub c000: f64,
    pub c001: f64,
    pub c010: f64,
    pub c100: f64,
    pub c110: f64,
    /// Real off-diagonal `<001|rho|110>`, equal to its mirror.
    pub coherence: f64,
}

impl GhzCoefficients {
    fn trace(&self) -> f64 {
        self.c000 + self.c001 + self.c010 + self.c100 + self.c110
    }

    fn scaled(&self, k: f64) -> Self {
        Self {
            c000: self.c000 * k,
            c001: self.c001 * k,
            c010: self.c010 * k,
            c100: self.c100 * k,
            c110: self.c110 * k,
            coherence: self.coherence * k,
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        let p = self.scaled(1.0 / self.trace());
        DensityMatrix::from_real_fn(3, |i, j| match (i, j) {
            (0b000, 0b000) => p.c000,
            (0b001, 0b001) => p.c001,
            (0b010, 0b010) => p.c010,
            (0b100, 0b100) => p.c100,
            (0b110, 0b110) => p.c110,
            (0b001, 0b110) | (0b110, 0b001) => p.coherence,
            _ => 0.0,
        })
        .expect("GHZ family is a valid state")
    }
}

/// Damped GHZ state after uniform filtering, with the filter success
/// probability `P'_w`.
pub fn ghz_noisy_and_filtered(d: AdParams, w: NrwmParams) -> (GhzCoefficients, f64) {
    let (dv, db, wb) = (d.d(), d.survival(), w.complement());
    let p_w = 0.5 * wb * (dv * (1.0 + dv) * wb * wb + db * wb + 2.0 * dv * db * wb + db * db);
    let raw = GhzCoefficients {
        c000: 0.5 * dv * (1.0 + dv) * wb.powi(3),
        c001: 0.5 * db * wb * wb,
        c010: 0.5 * dv * db * wb * wb,
        c100: 0.5 * dv * db * wb * wb,
        c110: 0.5 * db * db * wb,
        coherence: 0.5 * db.powf(1.5) * wb.powf(1.5),
    };
    (raw.scaled(1.0 / p_w), p_w)
}

/// One round of the GHZ two-copy protocol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhzRound {
    /// Probability of `111`, which leaves a perfect GHZ state.
    pub p_success: f64,
    /// Probability of `000`, whose control copy is recycled.
    pub p_recycle: f64,
    pub next: GhzCoefficients,
}

pub fn ghz_round(c: &GhzCoefficients) -> GhzRound {
    let c = c.scaled(1.0 / c.trace());
    let p_success = 2.0 * c.c001 * c.c110;
    let p_recycle =
        c.c000 * c.c000 + c.c001 * c.c001 + c.c010 * c.c010 + c.c100 * c.c100 + c.c110 * c.c110;
    let next = GhzCoefficients {
        c000: c.c000 * c.c000,
        c001: c.c001 * c.c001,
        c010: c.c010 * c.c010,
        c100: c.c100 * c.c100,
        c110: c.c110 * c.c110,
        coherence: c.coherence * c.coherence,
    }
    .scaled(1.0 / p_recycle);
    GhzRound {
        p_success,
        p_recycle,
        next,
    }
}

/// End-to-end GHZ efficiency `P'_w (Y_1 + ... + Y_m)`.
pub fn ghz_efficiency(s: &GhzScenario) -> Result<EfficiencyReport> {
    if s.rounds == 0 {
        return Err(Error::arg("at least one distillation round is required"));
    }
    let (c, p_w) = ghz_noisy_and_filtered(s.d, s.w);
    let yields = recurrence_yields((c.c001, c.c110), &[c.c000, c.c010, c.c100], s.rounds);
    Ok(EfficiencyReport::from_distillation_yields(p_w, &yields))
}
