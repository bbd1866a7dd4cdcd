use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{DEFAULT_SAMPLES, DEFAULT_SEED};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    BellTwocopy,
    BellBisection,
    BellNonmax,
    Ghz,
    WState,
    WRatio,
    WAsymptotic,
    OptimalW,
    Validate,
}

impl Protocol {
    pub const ALL: [Protocol; 9] = [
        Protocol::BellTwocopy,
        Protocol::BellBisection,
        Protocol::BellNonmax,
        Protocol::Ghz,
        Protocol::WState,
        Protocol::WRatio,
        Protocol::WAsymptotic,
        Protocol::OptimalW,
        Protocol::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Protocol::BellTwocopy => "bell-twocopy",
            Protocol::BellBisection => "bell-bisection",
            Protocol::BellNonmax => "bell-nonmax",
            Protocol::Ghz => "ghz",
            Protocol::WState => "w-state",
            Protocol::WRatio => "w-ratio",
            Protocol::WAsymptotic => "w-asymptotic",
            Protocol::OptimalW => "optimal-w",
            Protocol::Validate => "validate",
        }
    }

    fn allowed_axes(self) -> &'static [Param] {
        use Param::*;
        match self {
            Protocol::BellTwocopy => &[D, W, D1, D2, W1, W2],
            Protocol::BellBisection | Protocol::BellNonmax | Protocol::Ghz => &[D, W],
            Protocol::WState | Protocol::WRatio | Protocol::WAsymptotic => &[N, D, W],
            Protocol::OptimalW => &[N, D],
            Protocol::Validate => &[],
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Protocol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown protocol '{s}'")))
    }
}

/// A sweepable coordinate. `D` and `W` set the damping rate / filter strength
/// of every qubit at once; the numbered forms address one qubit of a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    D,
    W,
    D1,
    D2,
    W1,
    W2,
    #[serde(rename = "N")]
    N,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::D => "d",
            Param::W => "w",
            Param::D1 => "d1",
            Param::D2 => "d2",
            Param::W1 => "w1",
            Param::W2 => "w2",
            Param::N => "N",
        }
    }

    pub(crate) fn format(self, v: f64) -> String {
        match self {
            Param::N => format!("{}", v as usize),
            _ => format!("{v}"),
        }
    }

    fn check(self, v: f64) -> Result<()> {
        let ok = match self {
            Param::N => v >= 2.0 && v.fract() == 0.0 && v <= 64.0,
            _ => (0.0..1.0).contains(&v),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "{} = {v} is outside its domain",
                self.name()
            )))
        }
    }
}

/// `start:stop:step`, both ends inclusive. Values are rounded to 12 decimals
/// so that accumulated float error never leaks into output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridRange {
    pub fn single(v: f64) -> Self {
        Self {
            start: v,
            stop: v,
            step: 1.0,
        }
    }

    pub fn count(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count())
            .map(|k| ((self.start + k as f64 * self.step) * 1e12).round() / 1e12)
            .collect()
    }

    fn check(&self) -> Result<()> {
        let finite = self.start.is_finite() && self.stop.is_finite() && self.step.is_finite();
        if !finite || self.step <= 0.0 || self.stop < self.start {
            return Err(Error::Config(format!(
                "bad range {self}: need finite start <= stop and step > 0"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for GridRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

impl FromStr for GridRange {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number '{t}' in range '{s}'")))
        };
        let parts: Vec<&str> = s.split(':').collect();
        let r = match parts.as_slice() {
            [v] => GridRange::single(num(v)?),
            [a, b, c] => GridRange {
                start: num(a)?,
                stop: num(b)?,
                step: num(c)?,
            },
            _ => return Err(Error::Config(format!("range '{s}' is not start:stop:step"))),
        };
        r.check()?;
        Ok(r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub param: Param,
    pub range: GridRange,
}

/// Values used for every coordinate not swept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FixedParams {
    #[serde(rename = "N")]
    pub parties: usize,
    /// Two-copy rounds.
    pub m: usize,
    /// Bisection source pairs.
    pub n: usize,
    pub epsilon: f64,
    pub d1: f64,
    pub d2: f64,
    pub w1: f64,
    pub w2: f64,
    pub seed: u64,
    pub samples: usize,
}

impl Default for FixedParams {
    fn default() -> Self {
        Self {
            parties: 3,
            m: 10,
            n: 32,
            epsilon: 1e-6,
            d1: 0.0,
            d2: 0.0,
            w1: 0.0,
            w2: 0.0,
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
        }
    }
}

fn default_jobs() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub protocol: Protocol,
    #[serde(default)]
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub fixed: FixedParams,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
}

impl SweepConfig {
    pub fn new(protocol: Protocol) -> Self {
        Self {
            protocol,
            axes: Vec::new(),
            fixed: FixedParams::default(),
            jobs: default_jobs(),
        }
    }

    pub fn axis(mut self, param: Param, range: &str) -> Result<Self> {
        self.axes.push(Axis {
            param,
            range: range.parse()?,
        });
        Ok(self)
    }

    /// Reads a JSON config; any parse problem is a config error.
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Checks everything that can be checked before computing anything.
    pub fn validate(&self) -> Result<()> {
        let f = &self.fixed;
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        if !(f.epsilon > 0.0 && f.epsilon < 1.0) {
            return Err(Error::Config(format!(
                "epsilon {} outside (0,1)",
                f.epsilon
            )));
        }
        if f.m == 0 {
            return Err(Error::Config("m must be at least 1".into()));
        }
        if !(2..=crate::bell::MAX_BISECTION_COPIES).contains(&f.n) || !f.n.is_power_of_two() {
            return Err(Error::Config(format!(
                "n = {} must be a power of two in 2..={}",
                f.n,
                crate::bell::MAX_BISECTION_COPIES
            )));
        }
        Param::N.check(f.parties as f64)?;
        for (p, v) in [
            (Param::D1, f.d1),
            (Param::D2, f.d2),
            (Param::W1, f.w1),
            (Param::W2, f.w2),
        ] {
            p.check(v)?;
        }
        if self.protocol == Protocol::Validate {
            if f.samples == 0 {
                return Err(Error::Config("samples must be at least 1".into()));
            }
            if !self.axes.is_empty() {
                return Err(Error::Config("validate takes no axes".into()));
            }
            return Ok(());
        }
        if self.axes.is_empty() {
            return Err(Error::Config("a sweep needs at least one axis".into()));
        }
        let allowed = self.protocol.allowed_axes();
        for (i, a) in self.axes.iter().enumerate() {
            if !allowed.contains(&a.param) {
                return Err(Error::Config(format!(
                    "axis {} does not apply to {}",
                    a.param.name(),
                    self.protocol
                )));
            }
            if self.axes[..i].iter().any(|b| b.param == a.param) {
                return Err(Error::Config(format!(
                    "axis {} given twice",
                    a.param.name()
                )));
            }
            a.range.check()?;
            for v in a.range.values() {
                a.param.check(v)?;
            }
        }
        let has = |p: Param| self.axes.iter().any(|a| a.param == p);
        if (has(Param::D) && (has(Param::D1) || has(Param::D2)))
            || (has(Param::W) && (has(Param::W1) || has(Param::W2)))
        {
            return Err(Error::Config(
                "a shared axis and a per-qubit axis overlap".into(),
            ));
        }
        Ok(())
    }

    /// Grid points in row-major order (first axis outermost).
    pub fn points(&self) -> Vec<Vec<f64>> {
        self.axes.iter().fold(vec![Vec::new()], |acc, axis| {
            let values = axis.range.values();
            acc.into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        let r: GridRange = "0:0.99:0.01".parse().unwrap();
        assert_eq!(r.count(), 100);
        let v = r.values();
        assert_eq!(v[0], 0.0);
        assert_eq!(v[7], 0.07);
        assert_eq!(v[99], 0.99);
        assert_eq!("0.3".parse::<GridRange>().unwrap().values(), vec![0.3]);
        assert!("0:1".parse::<GridRange>().is_err());
        assert!("0:1:0".parse::<GridRange>().is_err());
        assert!("1:0:0.1".parse::<GridRange>().is_err());
        assert!("a:1:0.1".parse::<GridRange>().is_err());
    }

    #[test]
    fn protocol_names_round_trip() {
        for p in Protocol::ALL {
            assert_eq!(p.name().parse::<Protocol>().unwrap(), p);
            let json = serde_json::to_string(&p).unwrap();
            assert_eq!(json, format!("\"{}\"", p.name()));
        }
        assert!("bell".parse::<Protocol>().is_err());
    }

    #[test]
    fn row_major_points() {
        let cfg = SweepConfig::new(Protocol::Ghz)
            .axis(Param::D, "0.1:0.2:0.1")
            .unwrap()
            .axis(Param::W, "0:0.2:0.1")
            .unwrap();
        let p = cfg.points();
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![0.1, 0.0]);
        assert_eq!(p[1], vec![0.1, 0.1]);
        assert_eq!(p[3], vec![0.2, 0.0]);
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let ok = SweepConfig::new(Protocol::Ghz)
            .axis(Param::D, "0:0.5:0.1")
            .unwrap();
        assert!(ok.validate().is_ok());
        let out_of_domain = SweepConfig::new(Protocol::Ghz)
            .axis(Param::D, "0:1:0.1")
            .unwrap();
        assert!(out_of_domain.validate().is_err());
        let wrong_axis = SweepConfig::new(Protocol::Ghz)
            .axis(Param::N, "3:5:1")
            .unwrap();
        assert!(wrong_axis.validate().is_err());
        let overlap = SweepConfig::new(Protocol::BellTwocopy)
            .axis(Param::D, "0:0.5:0.1")
            .unwrap()
            .axis(Param::D1, "0:0.5:0.1")
            .unwrap();
        assert!(overlap.validate().is_err());
        let mut bad_eps = ok.clone();
        bad_eps.fixed.epsilon = 1.0;
        assert!(bad_eps.validate().is_err());
        let mut bad_n = ok.clone();
        bad_n.fixed.n = 24;
        assert!(bad_n.validate().is_err());
        let mut no_jobs = ok;
        no_jobs.jobs = 0;
        assert!(no_jobs.validate().is_err());
        assert!(SweepConfig::new(Protocol::WState).validate().is_err());
    }

    #[test]
    fn config_json_defaults() {
        let cfg: SweepConfig = serde_json::from_str(
            r#"{"protocol":"w-ratio","axes":[{"param":"d","range":{"start":0.1,"stop":0.2,"step":0.05}}],"fixed":{"N":4}}"#,
        )
        .unwrap();
        assert_eq!(cfg.fixed.parties, 4);
        assert_eq!(cfg.fixed.m, 10);
        assert_eq!(cfg.jobs, 1);
        assert!(cfg.validate().is_ok());
    }
}
