//! Step-count regions of the `(d, w)` plane and the exact `R <= 1` boundary.
//!
//! With `z = N (1-w) d / (1-d)` the filtered scheme needs `m` steps exactly
//! when `C^(2^-(m-1)) < z <= C^(2^-m)`, where `C = N eps / (1 - eps)`. Points
//! on a boundary belong to the region below it.

use serde::{Deserialize, Serialize};

use crate::channels::{AdParams, NrwmParams};
use crate::error::{Error, Result};

pub fn curve_constant(parties: usize, eps: f64) -> Result<f64> {
    if parties < 2 {
        return Err(Error::arg(format!(
            "need at least 2 parties, got {parties}"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::arg(format!("target infidelity {eps} outside (0,1)")));
    }
    Ok(parties as f64 * eps / (1.0 - eps))
}

/// Upper edge `z = level` of the `steps` region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionBoundary {
    pub steps: usize,
    pub level: f64,
}

impl RegionBoundary {
    /// Damping rate where the unfiltered scheme crosses this level
    /// (`N d / (1-d) = level`).
    pub fn unfiltered_d(&self, parties: usize) -> f64 {
        self.level / (parties as f64 + self.level)
    }

    /// Filter strength putting `(d, w)` on this level, if one exists in `[0,1)`.
    pub fn filter_for(&self, parties: usize, d: AdParams) -> Option<f64> {
        if d.d() == 0.0 {
            return None;
        }
        let wb = self.level * d.survival() / (parties as f64 * d.d());
        (wb > 0.0 && wb <= 1.0).then_some(1.0 - wb)
    }
}

pub fn region_boundaries(
    parties: usize,
    eps: f64,
    max_steps: usize,
) -> Result<Vec<RegionBoundary>> {
    let c = curve_constant(parties, eps)?;
    let mut level = c;
    let mut out = Vec::with_capacity(max_steps + 1);
    for steps in 0..=max_steps {
        out.push(RegionBoundary { steps, level });
        level = level.sqrt();
    }
    Ok(out)
}

/// Region index of `(d, w)` by walking up the boundary chain; `None` above
/// `z = 1`, where no number of steps suffices.
pub fn region_steps(parties: usize, d: AdParams, w: NrwmParams, eps: f64) -> Result<Option<usize>> {
    let c = curve_constant(parties, eps)?;
    let z = parties as f64 * w.complement() * d.d() / d.survival();
    if z >= 1.0 {
        return Ok(None);
    }
    let (mut steps, mut level) = (0, c);
    while z > level {
        steps += 1;
        level = level.sqrt();
        if level >= 1.0 {
            return Ok(None);
        }
    }
    Ok(Some(steps))
}

/// Point where the filtered `steps` curve meets the unfiltered
/// `reference_steps` line: `1 - w = C^(2^-steps - 2^-reference_steps)`.
/// Exists only for `steps < reference_steps`.
pub fn region_intersection(
    parties: usize,
    eps: f64,
    steps: usize,
    reference_steps: usize,
) -> Result<(f64, f64)> {
    if steps >= reference_steps {
        return Err(Error::arg(format!(
            "curves meet lines only for steps < reference steps ({steps} >= {reference_steps})"
        )));
    }
    let c = curve_constant(parties, eps)?;
    let line = c.powf(0.5f64.powi(reference_steps as i32));
    let d = line / (parties as f64 + line);
    let wb = c.powf(0.5f64.powi(steps as i32) - 0.5f64.powi(reference_steps as i32));
    Ok((d, 1.0 - wb))
}

/// Exact criterion for `R <= 1` between a filtered run of `steps` and an
/// unfiltered run of `reference_steps`, with `x = 1 - w` and
/// `y = N d / (1 - d)`:
///
/// `2^(m'-m) x^(N-1) [N + (xy)^(2^m)] prod_{i<m'} (N + y^(2^i))
///      <= (N + y^(2^m')) prod_{i<m} [N + (xy)^(2^i)]`.
pub fn boundary_inequality(
    parties: usize,
    steps: usize,
    reference_steps: usize,
    x: f64,
    y: f64,
) -> bool {
    let n = parties as f64;
    let side = |z: f64, k: usize| -> (f64, f64) {
        // (prod_{i<k} (N + z^(2^i)), N + z^(2^k))
        let mut pow = z;
        let mut prod = 1.0;
        for _ in 0..k {
            prod *= n + pow;
            pow *= pow;
        }
        (prod, n + pow)
    };
    let (prod_f, last_f) = side(x * y, steps);
    let (prod_r, last_r) = side(y, reference_steps);
    let scale = 2f64.powi(reference_steps as i32 - steps as i32);
    scale * x.powi(parties as i32 - 1) * last_f * prod_r <= last_r * prod_f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multipartite::w::{efficiency_ratio, w_trajectory, WScenario, DEFAULT_EPSILON};

    #[test]
    fn boundary_levels_increase() {
        let b = region_boundaries(3, DEFAULT_EPSILON, 8).unwrap();
        assert_eq!(b.len(), 9);
        assert!((b[0].level - 3e-6 / (1.0 - 1e-6)).abs() < 1e-20);
        assert!(b
            .windows(2)
            .all(|p| p[0].level < p[1].level && p[1].level < 1.0));
    }

    #[test]
    fn region_steps_match_trajectories() {
        for i in 1..60 {
            for j in 0..50 {
                let (d, w) = (i as f64 * 0.01, j as f64 * 0.02);
                let s = WScenario::new(3, d, w, DEFAULT_EPSILON).unwrap();
                let region = region_steps(3, s.d, s.w, DEFAULT_EPSILON).unwrap();
                let traj = w_trajectory(&s).ok().map(|t| t.steps);
                assert_eq!(region, traj, "d={d} w={w}");
            }
        }
    }

    #[test]
    fn small_damping_needs_nothing() {
        let c = curve_constant(3, DEFAULT_EPSILON).unwrap();
        let d = c / (3.0 + c) * 0.999;
        let s = WScenario::new(3, d, 0.0, DEFAULT_EPSILON).unwrap();
        assert_eq!(region_steps(3, s.d, s.w, DEFAULT_EPSILON).unwrap(), Some(0));
    }

    #[test]
    fn intersection_lies_on_both_edges() {
        let b = region_boundaries(3, DEFAULT_EPSILON, 8).unwrap();
        for (m, mp) in [(3, 4), (4, 6), (2, 7)] {
            let (d, w) = region_intersection(3, DEFAULT_EPSILON, m, mp).unwrap();
            assert!((b[mp].unfiltered_d(3) - d).abs() < 1e-15);
            let z = 3.0 * (1.0 - w) * d / (1.0 - d);
            assert!((z / b[m].level - 1.0).abs() < 1e-12);
            if mp == m + 1 {
                let y = 3.0 * d / (1.0 - d);
                assert!(((1.0 - w) - y).abs() < 1e-12);
            }
        }
        assert!(region_intersection(3, DEFAULT_EPSILON, 4, 4).is_err());
    }

    #[test]
    fn inequality_holds_with_equality_unfiltered() {
        for m in 0..8 {
            assert!(boundary_inequality(3, m, m, 1.0, 0.7));
        }
    }

    #[test]
    fn inequality_agrees_with_ratio() {
        let r = efficiency_ratio(
            3,
            AdParams::new(0.2).unwrap(),
            NrwmParams::new(0.5).unwrap(),
            DEFAULT_EPSILON,
        )
        .unwrap();
        let y = 3.0 * 0.2 / 0.8;
        assert!(!boundary_inequality(3, r.steps, r.reference_steps, 0.5, y));
    }
}
