//! Continuous refinement of a deployment by projected gradient ascent on the
//! coverage objective, seeded (typically) with the greedy placement.
//!
//! The gradient of `H` with respect to one agent's position is a central
//! finite difference on the quadrature objective. `p̂` jumps where visibility
//! changes, so an analytic gradient of the grid objective does not exist
//! everywhere; the difference quotient always does.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::QuadratureGrid;
use crate::geometry::{MissionSpace, Point};
use crate::sensing::{detection_prob, Agent, Deployment, SensorModel};

/// Step halvings tried before an iteration gives up.
pub const MAX_HALVINGS: usize = 20;

/// Minimum separation between agents after an update.
pub const MIN_SEPARATION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// All gradients from the current configuration, then all moves.
    #[default]
    Synchronous,
    /// Agents move one at a time, each seeing earlier agents' new positions.
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GgaConfig {
    /// Distance moved by the agent with the largest gradient in one step.
    pub step_size: f64,
    pub max_iterations: usize,
    /// Stop once every agent's gradient norm is at most this.
    pub stopping_threshold: f64,
    pub fd_epsilon: f64,
    pub backtracking: bool,
    pub schedule: Schedule,
}

impl GgaConfig {
    /// Defaults with the stopping threshold scaled to the grid cell area.
    pub fn for_grid(grid: &QuadratureGrid) -> Self {
        GgaConfig {
            stopping_threshold: 1e-3 * grid.cell_size * grid.cell_size,
            ..GgaConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("step size", self.step_size),
            ("stopping threshold", self.stopping_threshold),
            ("finite-difference epsilon", self.fd_epsilon),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_iterations < 1 {
            return Err(Error::param("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

impl Default for GgaConfig {
    fn default() -> Self {
        GgaConfig {
            step_size: 0.5,
            max_iterations: 500,
            stopping_threshold: 1e-3,
            fd_epsilon: 1e-3,
            backtracking: true,
            schedule: Schedule::Synchronous,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
    NoImprovement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GgaIteration {
    pub iteration: usize,
    pub positions: Vec<Point>,
    pub value: f64,
    /// Gradient norm of each agent at these positions.
    pub grad_norms: Vec<f64>,
}

impl GgaIteration {
    pub fn max_grad_norm(&self) -> f64 {
        self.grad_norms.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GgaTrace {
    /// Entry 0 is the initial deployment; one entry per completed sweep after.
    pub iterations: Vec<GgaIteration>,
    pub termination: Termination,
    models: Vec<SensorModel>,
}

impl GgaTrace {
    pub fn initial_value(&self) -> f64 {
        self.iterations[0].value
    }

    pub fn final_value(&self) -> f64 {
        self.iterations.last().expect("trace is never empty").value
    }

    pub fn final_positions(&self) -> &[Point] {
        &self
            .iterations
            .last()
            .expect("trace is never empty")
            .positions
    }

    pub fn final_deployment(&self, ms: &MissionSpace) -> Result<Deployment> {
        let agents = self
            .final_positions()
            .iter()
            .zip(&self.models)
            .map(|(&position, &model)| Agent { position, model })
            .collect();
        Deployment::new(agents, ms)
    }

    /// Sweeps performed.
    pub fn sweeps(&self) -> usize {
        self.iterations.len() - 1
    }

    /// CSV with header `iter,agent,x,y,H,grad_norm`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,agent,x,y,H,grad_norm\n");
        for it in &self.iterations {
            for (agent, (p, g)) in it.positions.iter().zip(&it.grad_norms).enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    it.iteration, agent, p.x, p.y, it.value, g
                );
            }
        }
        out
    }
}

/// Objective evaluation restricted to cells carrying event mass.
struct Evaluator<'a> {
    ms: &'a MissionSpace,
    centers: Vec<Point>,
    mass: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    fn new(grid: &QuadratureGrid, ms: &'a MissionSpace) -> Self {
        let (centers, mass) = grid
            .cells
            .iter()
            .filter(|c| c.weight * c.density > 0.0)
            .map(|c| (c.center, c.weight * c.density))
            .unzip();
        Evaluator { ms, centers, mass }
    }

    fn row(&self, model: &SensorModel, s: Point) -> Vec<f64> {
        self.centers
            .iter()
            .map(|&x| {
                if self.ms.is_visible(s, x, model.delta) {
                    detection_prob(model, s.dist(x))
                } else {
                    0.0
                }
            })
            .collect()
    }

    fn value(&self, rows: &[Vec<f64>]) -> f64 {
        (0..self.mass.len())
            .map(|c| {
                let miss: f64 = rows.iter().map(|r| 1.0 - r[c]).product();
                self.mass[c] * (1.0 - miss)
            })
            .sum()
    }

    /// `Π_{j≠i} (1 − p̂_j)` per cell.
    fn others(&self, rows: &[Vec<f64>], i: usize) -> Vec<f64> {
        (0..self.mass.len())
            .map(|c| {
                rows.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, r)| 1.0 - r[c])
                    .product()
            })
            .collect()
    }

    /// `H(s with agent moved to b) − H(s with agent moved to a)`.
    fn move_difference(&self, others: &[f64], model: &SensorModel, a: Point, b: Point) -> f64 {
        let ra = self.row(model, a);
        let rb = self.row(model, b);
        self.mass
            .iter()
            .zip(others)
            .zip(ra.iter().zip(&rb))
            .map(|((w, o), (pa, pb))| w * o * (pb - pa))
            .sum()
    }

    fn gradient(&self, others: &[f64], model: &SensorModel, s: Point, eps: f64) -> [f64; 2] {
        let mut g = [0.0; 2];
        for (axis, unit) in [Point::new(1.0, 0.0), Point::new(0.0, 1.0)]
            .into_iter()
            .enumerate()
        {
            let plus = s + unit * eps;
            let minus = s - unit * eps;
            let plus = if self.ms.is_feasible(plus) { plus } else { s };
            let minus = if self.ms.is_feasible(minus) { minus } else { s };
            let span = (plus - minus).dot(unit);
            if span == 0.0 {
                continue;
            }
            g[axis] = self.move_difference(others, model, minus, plus) / span;
        }
        g
    }
}

fn norm(g: [f64; 2]) -> f64 {
    g[0].hypot(g[1])
}

/// Central-difference estimate of `∂H/∂s_i`. A perturbation that leaves the
/// feasible space is replaced by the unperturbed position (one-sided
/// difference); if both leave it the component is zero.
pub fn objective_gradient(
    dep: &Deployment,
    agent_index: usize,
    grid: &QuadratureGrid,
    ms: &MissionSpace,
    cfg: &GgaConfig,
) -> Result<[f64; 2]> {
    let agent = dep.agents().get(agent_index).ok_or_else(|| {
        Error::arg(format!(
            "agent index {agent_index} out of range for {} agents",
            dep.len()
        ))
    })?;
    if !ms.is_feasible(agent.position) {
        return Err(Error::arg(format!("agent {agent_index} is not feasible")));
    }
    let ev = Evaluator::new(grid, ms);
    let rows: Vec<Vec<f64>> = dep
        .agents()
        .iter()
        .map(|a| ev.row(&a.model, a.position))
        .collect();
    let others = ev.others(&rows, agent_index);
    Ok(ev.gradient(&others, &agent.model, agent.position, cfg.fd_epsilon))
}

pub fn project_feasible(p: Point, ms: &MissionSpace) -> Point {
    ms.project_feasible(p)
}

struct Runner<'a> {
    ev: Evaluator<'a>,
    ms: &'a MissionSpace,
    cfg: GgaConfig,
    models: Vec<SensorModel>,
    positions: Vec<Point>,
    rows: Vec<Vec<f64>>,
    value: f64,
}

impl Runner<'_> {
    fn gradients(&self) -> Vec<[f64; 2]> {
        (0..self.positions.len())
            .into_par_iter()
            .map(|i| self.gradient_of(i))
            .collect()
    }

    fn gradient_of(&self, i: usize) -> [f64; 2] {
        let others = self.ev.others(&self.rows, i);
        self.ev.gradient(
            &others,
            &self.models[i],
            self.positions[i],
            self.cfg.fd_epsilon,
        )
    }

    fn collides(&self, candidate: Point, i: usize, proposed: &[Point]) -> bool {
        proposed
            .iter()
            .enumerate()
            .any(|(j, q)| j != i && q.dist(candidate) < MIN_SEPARATION)
    }

    /// One synchronous sweep; false when no step length improves `H`.
    fn synchronous_step(&mut self, grads: &[[f64; 2]], gmax: f64) -> bool {
        let mut zeta = self.cfg.step_size;
        for _ in 0..=MAX_HALVINGS {
            let mut proposed = self.positions.clone();
            for (i, g) in grads.iter().enumerate() {
                let s = self.positions[i];
                let target = self
                    .ms
                    .project_feasible(s + Point::new(g[0], g[1]) * (zeta / gmax));
                if !self.collides(target, i, &proposed) {
                    proposed[i] = target;
                }
            }
            if proposed == self.positions {
                return false;
            }
            let rows: Vec<Vec<f64>> = proposed
                .iter()
                .zip(&self.models)
                .map(|(&p, m)| self.ev.row(m, p))
                .collect();
            let value = self.ev.value(&rows);
            if !self.cfg.backtracking || value > self.value {
                self.positions = proposed;
                self.rows = rows;
                self.value = value;
                return true;
            }
            zeta *= 0.5;
        }
        false
    }

    /// One sequential sweep; false when no agent could improve `H`.
    fn sequential_step(&mut self) -> bool {
        let mut improved = false;
        for i in 0..self.positions.len() {
            let g = self.gradient_of(i);
            let gn = norm(g);
            if gn <= self.cfg.stopping_threshold {
                continue;
            }
            let others = self.ev.others(&self.rows, i);
            let s = self.positions[i];
            let mut zeta = self.cfg.step_size;
            for _ in 0..=MAX_HALVINGS {
                let target = self
                    .ms
                    .project_feasible(s + Point::new(g[0], g[1]) * (zeta / gn));
                if target == s || self.collides(target, i, &self.positions) {
                    break;
                }
                let row = self.ev.row(&self.models[i], target);
                let delta: f64 = self
                    .ev
                    .mass
                    .iter()
                    .zip(&others)
                    .zip(row.iter().zip(&self.rows[i]))
                    .map(|((w, o), (new, old))| w * o * (new - old))
                    .sum();
                if !self.cfg.backtracking || delta > 0.0 {
                    self.positions[i] = target;
                    self.rows[i] = row;
                    self.value = self.ev.value(&self.rows);
                    improved = true;
                    break;
                }
                zeta *= 0.5;
            }
        }
        improved
    }

    fn snapshot(&self, iteration: usize, grads: &[[f64; 2]]) -> GgaIteration {
        GgaIteration {
            iteration,
            positions: self.positions.clone(),
            value: self.value,
            grad_norms: grads.iter().map(|&g| norm(g)).collect(),
        }
    }
}

/// Greedy-gradient refinement of `initial`.
pub fn gga(
    initial: &Deployment,
    grid: &QuadratureGrid,
    ms: &MissionSpace,
    cfg: &GgaConfig,
) -> Result<GgaTrace> {
    cfg.validate()?;
    if initial.is_empty() {
        return Err(Error::arg("initial deployment has no agents"));
    }
    if let Some(i) = initial
        .agents()
        .iter()
        .position(|a| !ms.is_feasible(a.position))
    {
        return Err(Error::arg(format!(
            "initial position of agent {i} is not feasible"
        )));
    }
    let ev = Evaluator::new(grid, ms);
    let models: Vec<SensorModel> = initial.agents().iter().map(|a| a.model).collect();
    let positions = initial.positions();
    let rows: Vec<Vec<f64>> = positions
        .iter()
        .zip(&models)
        .map(|(&p, m)| ev.row(m, p))
        .collect();
    let value = ev.value(&rows);
    let mut run = Runner {
        ev,
        ms,
        cfg: *cfg,
        models,
        positions,
        rows,
        value,
    };

    let mut iterations = Vec::new();
    let mut sweeps = 0;
    let termination = loop {
        let grads = run.gradients();
        let snapshot = run.snapshot(sweeps, &grads);
        let gmax = snapshot.max_grad_norm();
        iterations.push(snapshot);
        if gmax <= cfg.stopping_threshold {
            break Termination::Converged;
        }
        if sweeps == cfg.max_iterations {
            break Termination::MaxIterations;
        }
        let moved = match cfg.schedule {
            // A visibility jump inside the difference stencil can inflate one
            // agent's gradient and shrink everyone else's normalized step;
            // per-agent steps still make progress in that case.
            Schedule::Synchronous => run.synchronous_step(&grads, gmax) || run.sequential_step(),
            Schedule::Sequential => run.sequential_step(),
        };
        if !moved {
            break Termination::NoImprovement;
        }
        sweeps += 1;
    };
    Ok(GgaTrace {
        iterations,
        termination,
        models: run.models,
    })
}
