//! Coverage optimization for agents with line-of-sight sensors in a polygonal
//! mission space with obstacles.
//!
//! The pipeline: build a [`MissionSpace`], discretize it with a
//! [`QuadratureGrid`] and a [`CandidateSet`], place agents greedily
//! ([`greedy_place_lazy`]), certify the placement with curvature bounds
//! ([`bound_report`]), and refine it continuously ([`gga`]).

pub mod curvature;
pub mod error;
pub mod field;
pub mod geometry;
pub mod gradient;
pub mod greedy;
pub mod oracle;
pub mod scenario;
pub mod sensing;

pub use curvature::{
    bound_e, bound_l, bound_report, bound_t, elemental_curvature, sweep_bounds, sweep_csv,
    total_curvature, AlphaDomain, BoundReport, SweepParam, SweepRow,
};
pub use error::{Error, Result};
pub use field::{build_candidates, build_grid, CandidateSet, Cell, EventDensity, QuadratureGrid};
pub use geometry::{is_feasible, is_visible, MissionSpace, Point, Polygon, EPS_GEO};
pub use gradient::{gga, objective_gradient, GgaConfig, GgaTrace, Schedule, Termination};
pub use greedy::{greedy_place, greedy_place_lazy, GreedyResult};
pub use oracle::{brute_force, check_definition_equivalence, check_submodular, OracleResult};
pub use scenario::{Instance, Overrides, Scenario};
pub use sensing::{
    coverage_objective, joint_detection, marginal_gain, Agent, CandidateCoverage, Deployment,
    SensorModel,
};
