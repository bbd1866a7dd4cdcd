//! Built-in sweep configurations, one per figure panel.

use super::config::{FixedParams, Param, Protocol, SweepConfig};
use crate::error::{Error, Result};

pub const FIGURE_IDS: [&str; 12] = [
    "1a", "1b", "1c", "1d", "2", "3", "4", "5", "6", "7", "8", "9",
];

const UNIT: &str = "0:0.99:0.01";
/// Damping rates strictly inside `(0, 1/4)` for the three-party W plots.
const W3_D: &str = "0.0025:0.2475:0.0025";

pub fn figure_preset(id: &str) -> Result<SweepConfig> {
    use Param::*;
    let fixed = |f: fn(&mut FixedParams)| {
        let mut p = FixedParams::default();
        f(&mut p);
        p
    };
    let cfg = match id {
        "1a" => SweepConfig::new(Protocol::BellTwocopy)
            .axis(D1, UNIT)?
            .axis(W1, UNIT)?,
        "1b" => SweepConfig::new(Protocol::BellTwocopy)
            .axis(D, UNIT)?
            .axis(W, UNIT)?,
        "1c" => SweepConfig {
            fixed: fixed(|p| (p.d1, p.d2) = (0.3, 0.7)),
            ..SweepConfig::new(Protocol::BellTwocopy)
                .axis(W1, UNIT)?
                .axis(W2, UNIT)?
        },
        "1d" => SweepConfig {
            fixed: fixed(|p| (p.d1, p.d2) = (0.5, 0.5)),
            ..SweepConfig::new(Protocol::BellTwocopy)
                .axis(W1, UNIT)?
                .axis(W2, UNIT)?
        },
        "2" => SweepConfig::new(Protocol::BellNonmax)
            .axis(D, UNIT)?
            .axis(W, UNIT)?,
        "3" => SweepConfig::new(Protocol::BellBisection)
            .axis(D, UNIT)?
            .axis(W, UNIT)?,
        "4" => SweepConfig::new(Protocol::Ghz)
            .axis(D, UNIT)?
            .axis(W, UNIT)?,
        "5" => SweepConfig::new(Protocol::WState)
            .axis(D, UNIT)?
            .axis(W, UNIT)?,
        "6" => SweepConfig::new(Protocol::WRatio)
            .axis(D, W3_D)?
            .axis(W, UNIT)?,
        "7" => SweepConfig::new(Protocol::OptimalW).axis(D, "0.001:0.249:0.001")?,
        "8" => SweepConfig::new(Protocol::OptimalW)
            .axis(N, "3:5:1")?
            .axis(D, "0.01:0.9:0.01")?,
        "9" => SweepConfig::new(Protocol::WAsymptotic)
            .axis(D, W3_D)?
            .axis(W, UNIT)?,
        other => {
            return Err(Error::Config(format!(
                "unknown figure '{other}'; choose one of {}",
                FIGURE_IDS.join(", ")
            )))
        }
    };
    Ok(cfg)
}
