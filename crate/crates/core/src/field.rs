//! Midpoint-rule quadrature grid over the mission space and the discrete
//! candidate lattice.

use crate::error::{Error, Result};
use crate::geometry::{MissionSpace, Point};

/// Event density `R(x)`.
#[derive(Debug, Clone, PartialEq)]
pub enum EventDensity {
    Uniform(f64),
    /// Piecewise-constant density: each location takes the value of the
    /// nearest sample (lowest index on ties).
    Sampled(Vec<(Point, f64)>),
}

impl EventDensity {
    pub fn validate(&self) -> Result<()> {
        match self {
            EventDensity::Uniform(v) if !(v.is_finite() && *v >= 0.0) => Err(Error::param(
                format!("uniform density must be finite and >= 0, got {v}"),
            )),
            EventDensity::Sampled(samples) if samples.is_empty() => {
                Err(Error::param("sampled density needs at least one sample"))
            }
            EventDensity::Sampled(samples) => {
                match samples
                    .iter()
                    .position(|(p, v)| !p.is_finite() || !v.is_finite() || *v < 0.0)
                {
                    Some(i) => Err(Error::param(format!(
                        "density sample {i} must have finite coordinates and a value >= 0"
                    ))),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }

    pub fn value_at(&self, p: Point) -> f64 {
        match self {
            EventDensity::Uniform(v) => *v,
            EventDensity::Sampled(samples) => {
                let mut best = (f64::INFINITY, 0.0);
                for (q, v) in samples {
                    let d = p.dist(*q);
                    if d < best.0 {
                        best = (d, *v);
                    }
                }
                best.1
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub center: Point,
    /// Cell area `h²`.
    pub weight: f64,
    /// `R` at the center; zero when the center is infeasible.
    pub density: f64,
    pub feasible: bool,
    /// Center lies in the closed mission polygon (obstacle interiors included).
    pub in_omega: bool,
}

/// Regular grid over the bounding box of the mission polygon, stored row-major
/// from the lowest row of cells upward.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub cell_size: f64,
    pub origin: Point,
    pub nx: usize,
    pub ny: usize,
    pub cells: Vec<Cell>,
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Per-cell `weight · density`, the integration weights for `∫ R f`.
    pub fn mass(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.weight * c.density).collect()
    }

    pub fn total_mass(&self) -> f64 {
        integrate(self, |_, _| 1.0)
    }
}

fn cell_count(extent: f64, h: f64) -> usize {
    // Snap near-integer ratios so 60 / 1 gives exactly 60 cells.
    let ratio = extent / h;
    let snapped = ratio.round();
    if (ratio - snapped).abs() < 1e-9 * ratio.max(1.0) {
        snapped as usize
    } else {
        ratio.ceil() as usize
    }
}

pub fn build_grid(ms: &MissionSpace, density: &EventDensity, h: f64) -> Result<QuadratureGrid> {
    density.validate()?;
    build_grid_with(ms, h, |p| density.value_at(p))
}

/// Like [`build_grid`] with an arbitrary density function.
pub fn build_grid_with(
    ms: &MissionSpace,
    h: f64,
    density: impl Fn(Point) -> f64,
) -> Result<QuadratureGrid> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::param(format!(
            "grid cell size must be positive, got {h}"
        )));
    }
    let bbox = ms.bbox();
    let limit = bbox.width().min(bbox.height()) / 4.0;
    if h > limit {
        return Err(Error::param(format!(
            "grid cell size {h} exceeds a quarter of the shorter side ({limit})"
        )));
    }
    let nx = cell_count(bbox.width(), h);
    let ny = cell_count(bbox.height(), h);
    let mut cells = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let center = Point::new(
                bbox.min.x + (i as f64 + 0.5) * h,
                bbox.min.y + (j as f64 + 0.5) * h,
            );
            let in_omega = ms.boundary().contains(center);
            let feasible = in_omega && ms.is_feasible(center);
            let value = if feasible { density(center) } else { 0.0 };
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::param(format!(
                    "density at ({}, {}) is {value}; it must be finite and >= 0",
                    center.x, center.y
                )));
            }
            cells.push(Cell {
                center,
                weight: h * h,
                density: value,
                feasible,
                in_omega,
            });
        }
    }
    Ok(QuadratureGrid {
        cell_size: h,
        origin: bbox.min,
        nx,
        ny,
        cells,
    })
}

/// `Σ weight · density · f(cell)` over all cells, summed in grid order.
pub fn integrate(grid: &QuadratureGrid, f: impl Fn(usize, &Cell) -> f64) -> f64 {
    grid.cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.density != 0.0)
        .map(|(i, c)| c.weight * c.density * f(i, c))
        .sum()
}

/// The discrete set of feasible agent positions.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub positions: Vec<Point>,
    pub spacing: f64,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Feasible points of the lattice anchored at the bounding-box minimum
/// corner, row-major by y then x.
pub fn build_candidates(ms: &MissionSpace, spacing: f64) -> Result<CandidateSet> {
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::param(format!(
            "candidate spacing must be positive, got {spacing}"
        )));
    }
    let bbox = ms.bbox();
    let steps = |extent: f64| (extent / spacing + 1e-9).floor() as usize;
    let (mx, my) = (steps(bbox.width()), steps(bbox.height()));
    let mut positions = Vec::new();
    for j in 0..=my {
        for i in 0..=mx {
            let p = Point::new(
                bbox.min.x + i as f64 * spacing,
                bbox.min.y + j as f64 * spacing,
            );
            if ms.is_feasible(p) {
                positions.push(p);
            }
        }
    }
    if positions.is_empty() {
        return Err(Error::EmptyCandidateSet { spacing });
    }
    Ok(CandidateSet { positions, spacing })
}
