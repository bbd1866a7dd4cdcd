//! Small-`eps` limit of the filtered/unfiltered efficiency ratio.
//!
//! As `eps -> 0` the products over steps become a Riemann sum and the ratio
//! tends to
//!
//! `(1-w)^(N-1) exp[(1/ln 2) int_{N lambda'}^{N lambda} ln(2N+2u) / (u ln u) du]`
//!
//! with `lambda' = d/(1-d)` and `lambda = (1-w) lambda'`. The integral is
//! evaluated in `s = ln u`, where the `1/u` factor disappears and the only
//! remaining difficulty is the `1/s` growth as the upper endpoint nears 1.

use std::f64::consts::LN_2;

use crate::channels::{AdParams, NrwmParams};
use crate::error::{Error, Result};
use crate::numeric::integrate;

/// Endpoints closer than this to `u = 1` are refused.
pub const SINGULARITY_GUARD: f64 = 1e-6;
const REL_TOL: f64 = 1e-9;
const MAX_INTERVALS: usize = 4000;

pub fn asymptotic_ratio(parties: usize, d: AdParams, w: NrwmParams) -> Result<f64> {
    if parties < 2 {
        return Err(Error::arg(format!(
            "need at least 2 parties, got {parties}"
        )));
    }
    let n = parties as f64;
    let prefactor = w.complement().powi(parties as i32 - 1);
    if d.d() == 0.0 {
        return Ok(prefactor);
    }
    let upper = n * d.d() / d.survival();
    let lower = w.complement() * upper;
    for (name, u) in [("unfiltered", upper), ("filtered", lower)] {
        if u >= 1.0 {
            return Err(Error::Domain(format!(
                "{name} scheme does not converge (N*lambda = {u})"
            )));
        }
        if u > 1.0 - SINGULARITY_GUARD {
            return Err(Error::Domain(format!(
                "{name} endpoint N*lambda = {u} too close to the singularity at 1"
            )));
        }
    }
    let integral = integrate(
        |s: f64| (2.0 * n + 2.0 * s.exp()).ln() / s,
        upper.ln(),
        lower.ln(),
        REL_TOL,
        MAX_INTERVALS,
    )?;
    Ok(prefactor * (integral.value / LN_2).exp())
}
