//! Multipartite distribution: three-qubit GHZ states and N-qubit W states.

pub mod asymptotic;
pub mod ghz;
pub mod regions;
pub mod w;

pub use asymptotic::asymptotic_ratio;
pub use ghz::{
    ghz_efficiency, ghz_noisy_and_filtered, ghz_round, GhzCoefficients, GhzRound, GhzScenario,
};
pub use regions::{
    boundary_inequality, curve_constant, region_boundaries, region_intersection, region_steps,
    RegionBoundary,
};
pub use w::{
    efficiency_ratio, optimal_w, required_steps, w_filtered, w_round, w_threshold_strength,
    w_trajectory, OptimalW, RatioReport, WFiltered, WRound, WScenario, WTrajectory,
    DEFAULT_EPSILON,
};
