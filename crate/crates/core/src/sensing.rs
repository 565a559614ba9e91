//! Sensing model, joint detection probability and the coverage objective
//! `H(s) = ∫ R(x) P(x, s) dx`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{integrate, CandidateSet, QuadratureGrid};
use crate::geometry::{MissionSpace, Point, EPS_GEO};

/// Exponential-decay sensor with a hard sensing radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorModel {
    /// Decay rate per unit length.
    pub lambda: f64,
    /// Sensing radius.
    pub delta: f64,
}

impl SensorModel {
    pub fn new(lambda: f64, delta: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::param(format!(
                "decay rate must be >= 0, got {lambda}"
            )));
        }
        if delta.is_nan() || delta <= 0.0 {
            return Err(Error::param(format!(
                "sensing radius must be > 0, got {delta}"
            )));
        }
        Ok(SensorModel { lambda, delta })
    }
}

pub fn detection_prob(model: &SensorModel, d: f64) -> f64 {
    (-model.lambda * d).exp()
}

/// Detection probability with visibility: zero outside the sensing radius or
/// behind obstacles.
pub fn effective_prob(model: &SensorModel, s: Point, x: Point, ms: &MissionSpace) -> f64 {
    if ms.is_feasible(x) && ms.is_visible(s, x, model.delta) {
        detection_prob(model, s.dist(x))
    } else {
        0.0
    }
}

/// Effective probabilities from `s` to every grid cell center. Cells whose
/// center is infeasible get zero.
pub fn probability_row(
    model: &SensorModel,
    s: Point,
    grid: &QuadratureGrid,
    ms: &MissionSpace,
) -> Vec<f64> {
    grid.cells
        .iter()
        .map(|c| {
            if c.feasible && ms.is_visible(s, c.center, model.delta) {
                detection_prob(model, s.dist(c.center))
            } else {
                0.0
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agent {
    pub position: Point,
    pub model: SensorModel,
}

/// Ordered agent positions with per-agent sensors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Deployment {
    agents: Vec<Agent>,
}

impl Deployment {
    pub fn new(agents: Vec<Agent>, ms: &MissionSpace) -> Result<Self> {
        for (i, a) in agents.iter().enumerate() {
            if !a.position.is_finite() || !ms.is_feasible(a.position) {
                return Err(Error::arg(format!(
                    "agent {i} at ({}, {}) is not in the feasible space",
                    a.position.x, a.position.y
                )));
            }
            if let Some(j) = agents[..i]
                .iter()
                .position(|b| b.position.dist(a.position) <= EPS_GEO)
            {
                return Err(Error::arg(format!(
                    "agents {j} and {i} share position ({}, {})",
                    a.position.x, a.position.y
                )));
            }
        }
        Ok(Deployment { agents })
    }

    /// Homogeneous deployment at the given positions.
    pub fn uniform(positions: &[Point], model: SensorModel, ms: &MissionSpace) -> Result<Self> {
        Deployment::new(
            positions
                .iter()
                .map(|&position| Agent { position, model })
                .collect(),
            ms,
        )
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn positions(&self) -> Vec<Point> {
        self.agents.iter().map(|a| a.position).collect()
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }
}

/// `P(x, s) = 1 − Π (1 − p̂_i)`.
pub fn joint_detection(dep: &Deployment, x: Point, ms: &MissionSpace) -> f64 {
    let miss: f64 = dep
        .agents
        .iter()
        .map(|a| 1.0 - effective_prob(&a.model, a.position, x, ms))
        .product();
    1.0 - miss
}

/// Per-cell probability that no agent detects an event, `Π (1 − p̂_i)`.
pub fn miss_product(dep: &Deployment, grid: &QuadratureGrid, ms: &MissionSpace) -> Vec<f64> {
    let mut product = vec![1.0; grid.len()];
    for a in &dep.agents {
        let row = probability_row(&a.model, a.position, grid, ms);
        for (m, p) in product.iter_mut().zip(&row) {
            *m *= 1.0 - p;
        }
    }
    product
}

pub fn coverage_objective(dep: &Deployment, grid: &QuadratureGrid, ms: &MissionSpace) -> f64 {
    if dep.is_empty() {
        return 0.0;
    }
    let product = miss_product(dep, grid, ms);
    integrate(grid, |i, _| 1.0 - product[i])
}

/// `H(S ∪ {s_k}) − H(S)` in a single pass as `∫ R p̂_k Π_{i∈S} (1 − p̂_i)`.
pub fn marginal_gain(
    dep: &Deployment,
    s_k: Point,
    model: &SensorModel,
    grid: &QuadratureGrid,
    ms: &MissionSpace,
) -> Result<f64> {
    if !ms.is_feasible(s_k) {
        return Err(Error::arg(format!(
            "position ({}, {}) is not feasible",
            s_k.x, s_k.y
        )));
    }
    if dep.agents.iter().any(|a| a.position.dist(s_k) <= EPS_GEO) {
        return Err(Error::arg(format!(
            "position ({}, {}) is already occupied",
            s_k.x, s_k.y
        )));
    }
    let product = miss_product(dep, grid, ms);
    let row = probability_row(model, s_k, grid, ms);
    Ok(integrate(grid, |i, _| row[i] * product[i]))
}

/// Precomputed `p̂` for every (source, cell) pair, one row per source.
#[derive(Debug, Clone)]
pub struct VisibilityCache {
    n_cells: usize,
    probs: Vec<f64>,
}

impl VisibilityCache {
    pub fn build(
        sources: &[Point],
        model: &SensorModel,
        grid: &QuadratureGrid,
        ms: &MissionSpace,
    ) -> Self {
        let rows: Vec<Vec<f64>> = sources
            .par_iter()
            .map(|&s| probability_row(model, s, grid, ms))
            .collect();
        VisibilityCache {
            n_cells: grid.len(),
            probs: rows.concat(),
        }
    }

    pub fn n_sources(&self) -> usize {
        self.probs.len().checked_div(self.n_cells).unwrap_or(0)
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn row(&self, source: usize) -> &[f64] {
        &self.probs[source * self.n_cells..(source + 1) * self.n_cells]
    }
}

/// The coverage objective restricted to a candidate set, viewed as a set
/// function over candidate indices.
#[derive(Debug, Clone)]
pub struct CandidateCoverage {
    positions: Vec<Point>,
    model: SensorModel,
    mass: Vec<f64>,
    cache: VisibilityCache,
}

impl CandidateCoverage {
    pub fn new(
        candidates: &CandidateSet,
        model: SensorModel,
        grid: &QuadratureGrid,
        ms: &MissionSpace,
    ) -> Self {
        CandidateCoverage {
            positions: candidates.positions.clone(),
            model,
            mass: grid.mass(),
            cache: VisibilityCache::build(&candidates.positions, &model, grid, ms),
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn model(&self) -> SensorModel {
        self.model
    }

    /// Per-cell `weight · R`.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn row(&self, candidate: usize) -> &[f64] {
        self.cache.row(candidate)
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// `H(S)` evaluated from scratch.
    pub fn value(&self, set: &[usize]) -> f64 {
        if set.is_empty() {
            return 0.0;
        }
        let mut product = vec![1.0; self.mass.len()];
        for &k in set {
            for (m, p) in product.iter_mut().zip(self.row(k)) {
                *m *= 1.0 - p;
            }
        }
        self.mass
            .iter()
            .zip(&product)
            .map(|(w, m)| w * (1.0 - m))
            .sum()
    }

    /// `H({j}) = ∫ R p̂_j`.
    pub fn single_value(&self, j: usize) -> f64 {
        self.mass.iter().zip(self.row(j)).map(|(w, p)| w * p).sum()
    }

    pub fn empty_state(&self) -> CoverageState {
        CoverageState {
            product: vec![1.0; self.mass.len()],
            members: Vec::new(),
            value: 0.0,
        }
    }

    pub fn state_for(&self, set: &[usize]) -> CoverageState {
        let mut state = self.empty_state();
        for &k in set {
            state.add(self, k);
        }
        state
    }
}

/// Running per-cell miss product for a growing candidate set.
#[derive(Debug, Clone)]
pub struct CoverageState {
    product: Vec<f64>,
    members: Vec<usize>,
    value: f64,
}

impl CoverageState {
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn product(&self) -> &[f64] {
        &self.product
    }

    /// Running objective value (sum of accepted gains).
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn contains(&self, k: usize) -> bool {
        self.members.contains(&k)
    }

    pub fn gain(&self, cov: &CandidateCoverage, k: usize) -> f64 {
        cov.mass
            .iter()
            .zip(cov.row(k))
            .zip(&self.product)
            .map(|((w, p), m)| w * p * m)
            .sum()
    }

    /// Adds candidate `k` and returns its marginal gain.
    pub fn add(&mut self, cov: &CandidateCoverage, k: usize) -> f64 {
        let gain = self.gain(cov, k);
        for (m, p) in self.product.iter_mut().zip(cov.row(k)) {
            *m *= 1.0 - p;
        }
        self.members.push(k);
        self.value += gain;
        gain
    }

    /// Rebuilds the product and value from the member list.
    pub fn recompute(&mut self, cov: &CandidateCoverage) {
        let fresh = cov.state_for(&self.members);
        self.product = fresh.product;
        self.value = cov.value(&self.members);
    }
}
