//! Amplitude-damping channels, null-result weak measurement filters, and
//! whole-register transmission.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{DensityMatrix, QubitOperator};

/// Damping rate `d` of an amplitude-damping channel, `0 <= d < 1`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct AdParams(f64);

impl AdParams {
    pub fn new(d: f64) -> Result<Self> {
        if (0.0..1.0).contains(&d) {
            Ok(Self(d))
        } else {
            Err(Error::arg(format!("damping rate {d} outside [0,1)")))
        }
    }

    pub fn d(self) -> f64 {
        self.0
    }

    /// `1 - d`.
    pub fn survival(self) -> f64 {
        1.0 - self.0
    }
}

impl TryFrom<f64> for AdParams {
    type Error = Error;
    fn try_from(d: f64) -> Result<Self> {
        Self::new(d)
    }
}

impl From<AdParams> for f64 {
    fn from(p: AdParams) -> f64 {
        p.0
    }
}

/// Strength `w` of a null-result weak measurement, `0 <= w < 1`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct NrwmParams(f64);

impl NrwmParams {
    pub fn new(w: f64) -> Result<Self> {
        if (0.0..1.0).contains(&w) {
            Ok(Self(w))
        } else {
            Err(Error::arg(format!(
                "measurement strength {w} outside [0,1)"
            )))
        }
    }

    pub fn none() -> Self {
        Self(0.0)
    }

    pub fn w(self) -> f64 {
        self.0
    }

    /// `1 - w`.
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }
}

impl TryFrom<f64> for NrwmParams {
    type Error = Error;
    fn try_from(w: f64) -> Result<Self> {
        Self::new(w)
    }
}

impl From<NrwmParams> for f64 {
    fn from(p: NrwmParams) -> f64 {
        p.0
    }
}

/// `K0 = |0><0| + sqrt(1-d)|1><1|`, `K1 = sqrt(d)|0><1|`.
pub fn ad_kraus(p: AdParams) -> [QubitOperator; 2] {
    [
        QubitOperator::from_real([[1.0, 0.0], [0.0, p.survival().sqrt()]]),
        QubitOperator::from_real([[0.0, p.d().sqrt()], [0.0, 0.0]]),
    ]
}

/// The raw weak measurement pair `{M0, M1}` before the bit flips:
/// `M0 = |0><0| + sqrt(1-w)|1><1|`, `M1 = sqrt(w)|1><1|`.
pub fn weak_measurement_pair(p: NrwmParams) -> [QubitOperator; 2] {
    [
        QubitOperator::from_real([[1.0, 0.0], [0.0, p.complement().sqrt()]]),
        QubitOperator::from_real([[0.0, 0.0], [0.0, p.w().sqrt()]]),
    ]
}

/// Flip-conjugated null-result element `sigma_x M0 sigma_x = diag(sqrt(1-w), 1)`.
pub fn nrwm_operator(p: NrwmParams) -> QubitOperator {
    QubitOperator::from_real([[p.complement().sqrt(), 0.0], [0.0, 1.0]])
}

/// Sends every qubit through its own damping channel.
pub fn transmit(state: &DensityMatrix, per_qubit: &[AdParams]) -> Result<DensityMatrix> {
    if per_qubit.len() != state.qubits() {
        return Err(Error::arg(format!(
            "{} damping rates given for {} qubits",
            per_qubit.len(),
            state.qubits()
        )));
    }
    per_qubit
        .iter()
        .enumerate()
        .try_fold(state.clone(), |s, (q, &p)| s.apply_channel(&ad_kraus(p), q))
}

/// Applies the NRWM filter on every qubit; the success probability is the
/// product of the chained conditional probabilities.
///
/// Returns `(None, 0.0)` if the filters can never all succeed.
pub fn filter_all(
    state: &DensityMatrix,
    per_qubit: &[NrwmParams],
) -> Result<(Option<DensityMatrix>, f64)> {
    if per_qubit.len() != state.qubits() {
        return Err(Error::arg(format!(
            "{} filter strengths given for {} qubits",
            per_qubit.len(),
            state.qubits()
        )));
    }
    let mut current = state.clone();
    let mut probability = 1.0;
    for (q, &p) in per_qubit.iter().enumerate() {
        let f = current.apply_filter(&nrwm_operator(p), q)?;
        probability *= f.probability;
        match f.state {
            Some(s) => current = s,
            None => return Ok((None, 0.0)),
        }
    }
    Ok((Some(current), probability))
}
