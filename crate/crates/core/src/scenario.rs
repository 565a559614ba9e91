//! JSON scenario files. Lengths are in mission-space units; field names carry
//! the unit (`_len`, `_per_len`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{build_candidates, build_grid, CandidateSet, EventDensity, QuadratureGrid};
use crate::geometry::{MissionSpace, Point, Polygon};
use crate::gradient::{GgaConfig, Schedule};
use crate::sensing::{CandidateCoverage, SensorModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// Mission polygon vertices.
    pub boundary: Vec<[f64; 2]>,
    #[serde(default)]
    pub obstacles: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    pub density: DensitySpec,
    pub grid_h_len: f64,
    pub candidate_spacing_len: f64,
    pub agents: usize,
    pub sensor: SensorSpec,
    #[serde(default)]
    pub gga: GgaSpec,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    Uniform {
        value: f64,
    },
    /// `[x, y, value]` triples; nearest sample wins.
    Sampled {
        samples: Vec<[f64; 3]>,
    },
}

impl Default for DensitySpec {
    fn default() -> Self {
        DensitySpec::Uniform { value: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorSpec {
    pub lambda_per_len: f64,
    pub delta_len: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleSpec {
    Synchronous,
    Sequential,
}

/// Unset fields take the [`GgaConfig::for_grid`] defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GgaSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_len: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stopping_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_epsilon_len: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backtracking: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleSpec>,
}

/// Command-line values that replace the file's.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub grid_h: Option<f64>,
    pub candidate_spacing: Option<f64>,
    pub agents: Option<usize>,
    pub lambda: Option<f64>,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
}

/// A validated scenario with its derived objects.
#[derive(Debug, Clone)]
pub struct Instance {
    pub scenario: Scenario,
    pub ms: MissionSpace,
    pub grid: QuadratureGrid,
    pub candidates: CandidateSet,
    pub model: SensorModel,
    pub gga: GgaConfig,
}

impl Instance {
    pub fn n_agents(&self) -> usize {
        self.scenario.agents
    }

    pub fn coverage(&self) -> CandidateCoverage {
        CandidateCoverage::new(&self.candidates, self.model, &self.grid, &self.ms)
    }
}

fn at(path: impl Into<String>, err: Error) -> Error {
    let path = path.into();
    match err {
        Error::InvalidParameter(m) => Error::InvalidParameter(format!("{path}: {m}")),
        Error::Scenario { .. } | Error::Io(_) => err,
        other => Error::Scenario {
            path,
            message: other.to_string(),
        },
    }
}

fn points(raw: &[[f64; 2]]) -> Vec<Point> {
    raw.iter().map(|&[x, y]| Point::new(x, y)).collect()
}

impl Scenario {
    /// Parses and validates JSON text.
    pub fn from_json(text: &str) -> Result<Scenario> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Scenario {
                path,
                message: e.into_inner().to_string(),
            }
        })?;
        scenario.build()?;
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Scenario> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Scenario::from_json(&text).map_err(|e| match e {
            Error::Scenario {
                path: field,
                message,
            } => Error::Scenario {
                path: format!("{}: {field}", path.display()),
                message,
            },
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn with_overrides(&self, o: &Overrides) -> Scenario {
        let mut s = self.clone();
        if let Some(v) = o.grid_h {
            s.grid_h_len = v;
        }
        if let Some(v) = o.candidate_spacing {
            s.candidate_spacing_len = v;
        }
        if let Some(v) = o.agents {
            s.agents = v;
        }
        if let Some(v) = o.lambda {
            s.sensor.lambda_per_len = v;
        }
        if let Some(v) = o.delta {
            s.sensor.delta_len = v;
        }
        if let Some(v) = o.seed {
            s.seed = v;
        }
        s
    }

    pub fn mission_space(&self) -> Result<MissionSpace> {
        let boundary = Polygon::new(points(&self.boundary)).map_err(|e| at("boundary", e))?;
        let mut obstacles = Vec::with_capacity(self.obstacles.len());
        for (i, raw) in self.obstacles.iter().enumerate() {
            let path = format!("obstacles[{i}]");
            let poly = Polygon::new(points(raw)).map_err(|e| at(path.clone(), e))?;
            if let Some(v) = poly.vertices().iter().find(|v| !boundary.contains(**v)) {
                return Err(Error::Scenario {
                    path,
                    message: format!("vertex ({}, {}) lies outside the boundary", v.x, v.y),
                });
            }
            obstacles.push(poly);
        }
        MissionSpace::new(boundary, obstacles).map_err(|e| at("obstacles", e))
    }

    pub fn event_density(&self) -> EventDensity {
        match &self.density {
            DensitySpec::Uniform { value } => EventDensity::Uniform(*value),
            DensitySpec::Sampled { samples } => EventDensity::Sampled(
                samples
                    .iter()
                    .map(|&[x, y, v]| (Point::new(x, y), v))
                    .collect(),
            ),
        }
    }

    /// Validates every field and builds the derived objects.
    pub fn build(&self) -> Result<Instance> {
        if self.agents < 1 {
            return Err(Error::param("agents: number of agents must be at least 1"));
        }
        let ms = self.mission_space()?;
        let grid = build_grid(&ms, &self.event_density(), self.grid_h_len).map_err(|e| {
            let path = match e {
                Error::InvalidParameter(ref m)
                    if m.starts_with("density") || m.starts_with("uniform") =>
                {
                    "density"
                }
                _ => "grid_h_len",
            };
            at(path, e)
        })?;
        let candidates = build_candidates(&ms, self.candidate_spacing_len)
            .map_err(|e| at("candidate_spacing_len", e))?;
        let model = SensorModel::new(self.sensor.lambda_per_len, self.sensor.delta_len)
            .map_err(|e| at("sensor", e))?;
        let gga = self.gga_config(&grid);
        gga.validate().map_err(|e| at("gga", e))?;
        Ok(Instance {
            scenario: self.clone(),
            ms,
            grid,
            candidates,
            model,
            gga,
        })
    }

    fn gga_config(&self, grid: &QuadratureGrid) -> GgaConfig {
        let d = GgaConfig::for_grid(grid);
        let g = &self.gga;
        GgaConfig {
            step_size: g.step_len.unwrap_or(d.step_size),
            max_iterations: g.max_iterations.unwrap_or(d.max_iterations),
            stopping_threshold: g.stopping_threshold.unwrap_or(d.stopping_threshold),
            fd_epsilon: g.fd_epsilon_len.unwrap_or(d.fd_epsilon),
            backtracking: g.backtracking.unwrap_or(d.backtracking),
            schedule: match g.schedule {
                None => d.schedule,
                Some(ScheduleSpec::Synchronous) => Schedule::Synchronous,
                Some(ScheduleSpec::Sequential) => Schedule::Sequential,
            },
        }
    }
}
