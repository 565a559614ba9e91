//! Curvature of the coverage objective and the greedy performance bounds
//! they certify.
//!
//! - total curvature `c = max_j [1 − (H(F) − H(F∖j)) / H({j})]`, bound
//!   `T(c, N) = (1/c) [1 − ((N − c)/N)^N]`;
//! - elemental curvature, which for this objective reduces to
//!   `α = 1 − min_{j, x} p̂_j(x)`, bound
//!   `E(α, N) = 1 − ((α + … + α^{N−1}) / (1 + α + … + α^{N−1}))^N`;
//! - `L(N) = max(T, E)`: the greedy value is at least `L(N)` times the optimum.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{CandidateSet, QuadratureGrid};
use crate::geometry::MissionSpace;
use crate::sensing::{CandidateCoverage, SensorModel};

/// Which grid cells the elemental-curvature minimum ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphaDomain {
    /// Cells whose center is feasible.
    #[default]
    Feasible,
    /// Every cell whose center lies in the mission polygon, obstacle
    /// interiors included. Any obstacle then forces `α = 1`.
    Omega,
}

impl FromStr for AlphaDomain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "feasible" => Ok(AlphaDomain::Feasible),
            "omega" => Ok(AlphaDomain::Omega),
            other => Err(Error::param(format!(
                "alpha domain must be `feasible` or `omega`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalCurvature {
    pub c: f64,
    /// Candidate attaining the maximum.
    pub argmax: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementalCurvature {
    pub alpha: f64,
    /// Grid cell attaining the minimum probability.
    pub cell: usize,
    /// Candidate attaining the minimum probability.
    pub candidate: usize,
}

/// Miss factors closer to zero than this are not divided out.
const DIVISION_GUARD: f64 = 1e-12;

pub fn total_curvature(cov: &CandidateCoverage) -> Result<TotalCurvature> {
    if cov.is_empty() {
        return Err(Error::arg("candidate set is empty"));
    }
    let n = cov.len();
    let mass = cov.mass();
    let mut full = vec![1.0; mass.len()];
    for j in 0..n {
        for (m, p) in full.iter_mut().zip(cov.row(j)) {
            *m *= 1.0 - p;
        }
    }
    let mut best = TotalCurvature {
        c: f64::NEG_INFINITY,
        argmax: 0,
    };
    for j in 0..n {
        let row = cov.row(j);
        let mut numer = 0.0;
        let mut denom = 0.0;
        for (cell, (&w, &p)) in mass.iter().zip(row).enumerate() {
            if w == 0.0 || p == 0.0 {
                continue;
            }
            let others = if 1.0 - p >= DIVISION_GUARD {
                full[cell] / (1.0 - p)
            } else {
                (0..n)
                    .filter(|&i| i != j)
                    .map(|i| 1.0 - cov.row(i)[cell])
                    .product()
            };
            numer += w * p * others;
            denom += w * p;
        }
        if denom <= 0.0 {
            let pos = cov.positions()[j];
            return Err(Error::DegenerateCandidate {
                index: j,
                x: pos.x,
                y: pos.y,
            });
        }
        let c = 1.0 - numer / denom;
        if c > best.c {
            best = TotalCurvature { c, argmax: j };
        }
    }
    best.c = best.c.clamp(0.0, 1.0);
    Ok(best)
}

pub fn elemental_curvature(
    cov: &CandidateCoverage,
    grid: &QuadratureGrid,
    domain: AlphaDomain,
) -> Result<ElementalCurvature> {
    if cov.is_empty() {
        return Err(Error::arg("candidate set is empty"));
    }
    let in_domain: Vec<usize> = grid
        .cells
        .iter()
        .enumerate()
        .filter(|(_, c)| match domain {
            AlphaDomain::Feasible => c.feasible,
            AlphaDomain::Omega => c.in_omega,
        })
        .map(|(i, _)| i)
        .collect();
    if in_domain.is_empty() {
        return Err(Error::arg("no grid cell lies in the curvature domain"));
    }
    let mut best = ElementalCurvature {
        alpha: f64::NEG_INFINITY,
        cell: 0,
        candidate: 0,
    };
    let mut min_p = f64::INFINITY;
    for j in 0..cov.len() {
        let row = cov.row(j);
        for &cell in &in_domain {
            if row[cell] < min_p {
                min_p = row[cell];
                best.cell = cell;
                best.candidate = j;
            }
        }
    }
    best.alpha = (1.0 - min_p).clamp(0.0, 1.0);
    Ok(best)
}

fn check_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must lie in [0, 1], got {v}")))
    }
}

fn check_agents(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::param("number of agents must be at least 1"))
    } else {
        Ok(())
    }
}

/// `T(c, N)`, with `T(0, N) = 1` by continuity.
pub fn bound_t(c: f64, n: usize) -> Result<f64> {
    check_unit("total curvature", c)?;
    check_agents(n)?;
    if c == 0.0 {
        return Ok(1.0);
    }
    let n = n as f64;
    // 1 − ((N − c)/N)^N = −expm1(N · ln(1 − c/N))
    Ok(-(n * (-c / n).ln_1p()).exp_m1() / c)
}

/// `E(α, N)` via the closed forms for `α = 1` and `α < 1`.
pub fn bound_e(alpha: f64, n: usize) -> Result<f64> {
    check_unit("elemental curvature", alpha)?;
    check_agents(n)?;
    if n == 1 {
        return Ok(1.0);
    }
    let nf = n as f64;
    let ratio = if alpha == 1.0 {
        (nf - 1.0) / nf
    } else {
        // (α − α^N) / (1 − α^N) = α (1 − α^{N−1}) / (1 − α^N), with
        // 1 − α^k = −expm1(k ln(1 − β)) so α close to 1 does not cancel.
        let l = (-(1.0 - alpha)).ln_1p();
        alpha * ((nf - 1.0) * l).exp_m1() / (nf * l).exp_m1()
    };
    Ok(1.0 - ratio.powf(nf))
}

pub fn bound_l(t: f64, e: f64) -> f64 {
    t.max(e)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub c: f64,
    pub alpha: f64,
    pub t: f64,
    pub e: f64,
    pub l: f64,
    pub n_agents: usize,
    pub c_argmax: usize,
    pub alpha_argmin_cell: usize,
    pub alpha_argmin_candidate: usize,
    pub greedy_value: Option<f64>,
}

pub fn bound_report(
    cov: &CandidateCoverage,
    grid: &QuadratureGrid,
    n_agents: usize,
    domain: AlphaDomain,
) -> Result<BoundReport> {
    let tc = total_curvature(cov)?;
    let ec = elemental_curvature(cov, grid, domain)?;
    let t = bound_t(tc.c, n_agents)?;
    let e = bound_e(ec.alpha, n_agents)?;
    Ok(BoundReport {
        c: tc.c,
        alpha: ec.alpha,
        t,
        e,
        l: bound_l(t, e),
        n_agents,
        c_argmax: tc.argmax,
        alpha_argmin_cell: ec.cell,
        alpha_argmin_candidate: ec.candidate,
        greedy_value: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Lambda,
    Delta,
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda" => Ok(SweepParam::Lambda),
            "delta" => Ok(SweepParam::Delta),
            other => Err(Error::param(format!(
                "sweep parameter must be `lambda` or `delta`, got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::Lambda => "lambda",
            SweepParam::Delta => "delta",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub report: BoundReport,
}

/// Bound reports with one sensing parameter varied and everything else fixed.
#[allow(clippy::too_many_arguments)]
pub fn sweep_bounds(
    ms: &MissionSpace,
    grid: &QuadratureGrid,
    candidates: &CandidateSet,
    base: SensorModel,
    n_agents: usize,
    domain: AlphaDomain,
    param: SweepParam,
    values: &[f64],
) -> Result<Vec<SweepRow>> {
    if let Some(v) = values.iter().find(|v| v.is_nan() || **v <= 0.0) {
        return Err(Error::param(format!(
            "sweep values must be positive, got {v}"
        )));
    }
    values
        .iter()
        .map(|&value| {
            let model = match param {
                SweepParam::Lambda => SensorModel::new(value, base.delta)?,
                SweepParam::Delta => SensorModel::new(base.lambda, value)?,
            };
            let cov = CandidateCoverage::new(candidates, model, grid, ms);
            Ok(SweepRow {
                value,
                report: bound_report(&cov, grid, n_agents, domain)?,
            })
        })
        .collect()
}

/// Evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..steps)
            .map(|i| start + (stop - start) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// Formats `v` with `digits` significant digits.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.prec$e}", prec = digits - 1)
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("param,c,alpha,T,E,L\n");
    for row in rows {
        let r = &row.report;
        let fields = [row.value, r.c, r.alpha, r.t, r.e, r.l].map(|v| format_significant(v, 12));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{build_candidates, build_grid, EventDensity};
    use crate::geometry::{Point, Polygon};

    fn rect(w: f64, h: f64) -> MissionSpace {
        MissionSpace::new(Polygon::rectangle(0.0, 0.0, w, h).unwrap(), vec![]).unwrap()
    }

    #[test]
    fn bound_values() {
        let e = bound_e(1.0, 10).unwrap();
        assert!((e - 0.6513).abs() < 5e-5, "{e}");
        assert!((e - (1.0 - 0.9f64.powi(10))).abs() < 1e-15);
        assert!((bound_t(1.0, 10).unwrap() - 0.651_321_559_9).abs() < 1e-10);
        assert_eq!(bound_t(0.0, 7).unwrap(), 1.0);
        assert_eq!(bound_e(0.0, 7).unwrap(), 1.0);
        assert!((bound_e(0.5, 2).unwrap() - 8.0 / 9.0).abs() < 1e-15);
        let big = bound_t(1.0, 1_000_000).unwrap();
        assert!((big - (1.0 - (-1.0f64).exp())).abs() < 1e-6);
        assert!(bound_t(1.1, 3).is_err());
        assert!(bound_t(-0.1, 3).is_err());
        assert!(bound_e(1.5, 3).is_err());
        assert!(bound_e(0.5, 0).is_err());
    }

    #[test]
    fn bound_e_matches_geometric_series() {
        for n in 1..=12 {
            for k in 0..=20 {
                let a = k as f64 / 20.0;
                let num: f64 = (1..n).map(|i| a.powi(i as i32)).sum();
                let den: f64 = (0..n).map(|i| a.powi(i as i32)).sum();
                let oracle = 1.0 - (num / den).powi(n as i32);
                assert!(
                    (bound_e(a, n).unwrap() - oracle).abs() < 1e-12,
                    "a={a} n={n}"
                );
            }
        }
    }

    #[test]
    fn bounds_are_monotone_and_above_one_minus_inv_e() {
        let floor = 1.0 - (-1.0f64).exp();
        for n in [1usize, 2, 5, 10, 50] {
            let mut prev_t = f64::INFINITY;
            let mut prev_e = f64::INFINITY;
            for k in 0..=100 {
                let x = k as f64 / 100.0;
                let t = bound_t(x, n).unwrap();
                let e = bound_e(x, n).unwrap();
                assert!(t <= prev_t + 1e-15 && e <= prev_e + 1e-15);
                assert!(t >= floor - 1e-15);
                assert!(e > 0.0 && e <= 1.0);
                prev_t = t;
                prev_e = e;
            }
        }
        for n in 1..=50 {
            assert!((bound_t(1.0, n).unwrap() - bound_e(1.0, n).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn bound_e_is_stable_near_one() {
        let mut prev = 0.0;
        for k in (1..=40).rev() {
            let alpha = 1.0 - 10f64.powi(-k) * 0.5;
            let e = bound_e(alpha, 10).unwrap();
            assert!(e >= prev - 1e-12, "alpha {alpha}: {e} < {prev}");
            prev = e;
        }
        assert!((bound_e(1.0 - 1e-12, 10).unwrap() - bound_e(1.0, 10).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn bound_l_is_the_larger() {
        assert_eq!(bound_l(0.65, 0.99), 0.99);
        assert_eq!(bound_l(0.99, 0.65), 0.99);
        assert_eq!(bound_l(0.7, 0.7), 0.7);
    }

    fn coverage(
        ms: &MissionSpace,
        cands: Vec<Point>,
        lambda: f64,
        delta: f64,
        h: f64,
    ) -> (CandidateCoverage, QuadratureGrid) {
        let grid = build_grid(ms, &EventDensity::Uniform(1.0), h).unwrap();
        let set = CandidateSet {
            positions: cands,
            spacing: 1.0,
        };
        (
            CandidateCoverage::new(&set, SensorModel::new(lambda, delta).unwrap(), &grid, ms),
            grid,
        )
    }

    #[test]
    fn total_curvature_edge_cases() {
        let ms = rect(40.0, 20.0);
        let (cov, _) = coverage(&ms, vec![Point::new(20.0, 10.0)], 0.1, 30.0, 1.0);
        assert_eq!(total_curvature(&cov).unwrap().c, 0.0);
        // Disjoint sensing disks.
        let (cov, _) = coverage(
            &ms,
            vec![Point::new(5.0, 10.0), Point::new(35.0, 10.0)],
            0.1,
            4.0,
            1.0,
        );
        assert_eq!(total_curvature(&cov).unwrap().c, 0.0);
        // A candidate that sees no mass.
        let grid = crate::field::build_grid_with(&ms, 1.0, |p| if p.x < 10.0 { 1.0 } else { 0.0 })
            .unwrap();
        let set = CandidateSet {
            positions: vec![Point::new(2.0, 2.0), Point::new(38.0, 10.0)],
            spacing: 1.0,
        };
        let cov = CandidateCoverage::new(&set, SensorModel::new(0.1, 5.0).unwrap(), &grid, &ms);
        assert!(matches!(
            total_curvature(&cov),
            Err(Error::DegenerateCandidate { index: 1, .. })
        ));
    }

    #[test]
    fn total_curvature_matches_definition() {
        let ms = MissionSpace::new(
            Polygon::rectangle(0.0, 0.0, 20.0, 15.0).unwrap(),
            vec![Polygon::rectangle(9.0, 3.0, 11.0, 12.0).unwrap()],
        )
        .unwrap();
        let grid = build_grid(&ms, &EventDensity::Uniform(1.0), 1.0).unwrap();
        let cands = build_candidates(&ms, 5.0).unwrap();
        let cov = CandidateCoverage::new(&cands, SensorModel::new(0.1, 12.0).unwrap(), &grid, &ms);
        let all: Vec<usize> = (0..cov.len()).collect();
        let h_all = cov.value(&all);
        let oracle = (0..cov.len())
            .map(|j| {
                let rest: Vec<usize> = all.iter().copied().filter(|&i| i != j).collect();
                1.0 - (h_all - cov.value(&rest)) / cov.value(&[j])
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let c = total_curvature(&cov).unwrap().c;
        assert!((c - oracle).abs() < 1e-9, "{c} vs {oracle}");
    }

    #[test]
    fn candidate_on_a_cell_center_hits_the_guard() {
        let ms = rect(10.0, 10.0);
        let (cov, _) = coverage(
            &ms,
            vec![Point::new(4.5, 4.5), Point::new(7.0, 7.0)],
            0.3,
            20.0,
            1.0,
        );
        let all = [0usize, 1];
        let h_all = cov.value(&all);
        let oracle = (0..2)
            .map(|j| 1.0 - (h_all - cov.value(&[1 - j])) / cov.value(&[j]))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((total_curvature(&cov).unwrap().c - oracle).abs() < 1e-12);
    }

    #[test]
    fn elemental_curvature_cases() {
        // Obstacle shadow.
        let ms = MissionSpace::new(
            Polygon::rectangle(0.0, 0.0, 20.0, 20.0).unwrap(),
            vec![Polygon::rectangle(8.0, 8.0, 12.0, 12.0).unwrap()],
        )
        .unwrap();
        let (cov, grid) = coverage(&ms, vec![Point::new(2.0, 10.0)], 0.01, 100.0, 1.0);
        assert_eq!(
            elemental_curvature(&cov, &grid, AlphaDomain::Feasible)
                .unwrap()
                .alpha,
            1.0
        );

        // Short range.
        let open = rect(20.0, 20.0);
        let (cov, grid) = coverage(&open, vec![Point::new(10.0, 10.0)], 0.01, 5.0, 1.0);
        assert_eq!(
            elemental_curvature(&cov, &grid, AlphaDomain::Feasible)
                .unwrap()
                .alpha,
            1.0
        );

        // Full reach: α = 1 − exp(−λ d_max) with d_max to the farthest cell center.
        let cands = vec![Point::new(0.0, 0.0), Point::new(10.0, 10.0)];
        let (cov, grid) = coverage(&open, cands, 0.02, 100.0, 1.0);
        let d_max = Point::new(0.0, 0.0).dist(Point::new(19.5, 19.5));
        let ec = elemental_curvature(&cov, &grid, AlphaDomain::Feasible).unwrap();
        assert!((ec.alpha - (1.0 - (-0.02 * d_max).exp())).abs() < 1e-14);
        assert_eq!(ec.candidate, 0);
        assert_eq!(grid.cells[ec.cell].center, Point::new(19.5, 19.5));
    }

    #[test]
    fn omega_domain_counts_obstacle_interiors() {
        // A corner block casts no shadow on the feasible space as seen from the
        // origin, but its interior cells are never visible.
        let ms = MissionSpace::new(
            Polygon::rectangle(0.0, 0.0, 20.0, 20.0).unwrap(),
            vec![Polygon::rectangle(17.0, 17.0, 20.0, 20.0).unwrap()],
        )
        .unwrap();
        let (cov, grid) = coverage(&ms, vec![Point::new(0.0, 0.0)], 0.01, 100.0, 1.0);
        let feasible = elemental_curvature(&cov, &grid, AlphaDomain::Feasible).unwrap();
        let omega = elemental_curvature(&cov, &grid, AlphaDomain::Omega).unwrap();
        assert!(feasible.alpha < 1.0);
        assert_eq!(omega.alpha, 1.0);
        assert!("omega".parse::<AlphaDomain>().is_ok());
        assert!("everything".parse::<AlphaDomain>().is_err());
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(0.651321559904, 12), "0.651321559904");
        assert_eq!(format_significant(80.0, 12), "80.0000000000");
        assert_eq!(format_significant(0.005, 12), "0.00500000000000");
        assert_eq!(format_significant(1.0, 3), "1.00");
        assert_eq!(format_significant(0.0, 12), "0");
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(0.005, 0.5, 100);
        assert_eq!(v.len(), 100);
        assert_eq!(v[0], 0.005);
        assert!((v[99] - 0.5).abs() < 1e-15);
        assert!((v[1] - 0.01).abs() < 1e-15);
    }
}
