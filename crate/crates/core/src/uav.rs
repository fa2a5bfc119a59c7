//! 3D UAV flight-cost scenario.
//!
//! A candidate vector holds `n_interior` waypoints `(x, y, z)` laid out
//! consecutively; the fixed start and end points are prepended and appended.
//! The cost is the mean of four terms: path length, threat proximity to
//! vertical cylinders, altitude band violations, and turn/pitch smoothness.

use std::f64::consts::SQRT_2;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::point_segment_distance_2d;
use crate::objective::Objective;
use crate::space::SearchSpace;

pub type Point3 = [f64; 3];

/// Underlying terrain `2(cos x + sin x) + sin r + cos r` with `r = |(x, y)|`.
pub fn terrain_base_height(x: f64, y: f64) -> f64 {
    let r = x.hypot(y);
    2.0 * (x.cos() + x.sin()) + r.sin() + r.cos()
}

/// Upper bound on `|terrain_base_height|`: `2 sqrt 2 + sqrt 2`.
pub const TERRAIN_BASE_AMPLITUDE: f64 = 3.0 * SQRT_2;

/// One Gaussian hill.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Slope {
    pub height: f64,
    pub center: [f64; 2],
    pub attenuation: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlopeExponent {
    /// `((x - x_i) / x_si)^2`.
    #[default]
    Corrected,
    /// `((x^2 - x_i) / x_si)^2`, as sometimes printed.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TerrainModel {
    pub slopes: Vec<Slope>,
    pub exponent: SlopeExponent,
}

impl TerrainModel {
    pub fn new(slopes: Vec<Slope>, exponent: SlopeExponent) -> Result<Self> {
        if slopes
            .iter()
            .any(|s| !(s.attenuation[0] > 0.0 && s.attenuation[1] > 0.0))
        {
            return Err(Error::invalid("slope attenuation must be positive"));
        }
        Ok(Self { slopes, exponent })
    }

    /// Total ground height: base terrain plus hills.
    pub fn height(&self, x: f64, y: f64) -> f64 {
        terrain_base_height(x, y) + slope_height(x, y, self)
    }
}

/// Sum of Gaussian hills `h_i exp(-((x - x_i)/x_si)^2 - ((y - y_i)/y_si)^2)`.
pub fn slope_height(x: f64, y: f64, terrain: &TerrainModel) -> f64 {
    terrain
        .slopes
        .iter()
        .map(|s| {
            let (u, v) = match terrain.exponent {
                SlopeExponent::Corrected => (x - s.center[0], y - s.center[1]),
                SlopeExponent::Literal => (x * x - s.center[0], y * y - s.center[1]),
            };
            let (u, v) = (u / s.attenuation[0], v / s.attenuation[1]);
            s.height * (-u * u - v * v).exp()
        })
        .sum()
}

/// Vertical cylinder threat. `z` is the cylinder top.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderObstacle {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub radius: f64,
}

/// The ten peaks/threats used by the reference scenario.
pub const DEFAULT_OBSTACLES: [CylinderObstacle; 10] = [
    CylinderObstacle {
        x: 400.0,
        y: 500.0,
        z: 150.0,
        radius: 30.0,
    },
    CylinderObstacle {
        x: 700.0,
        y: 150.0,
        z: 150.0,
        radius: 50.0,
    },
    CylinderObstacle {
        x: 550.0,
        y: 450.0,
        z: 150.0,
        radius: 40.0,
    },
    CylinderObstacle {
        x: 350.0,
        y: 100.0,
        z: 150.0,
        radius: 50.0,
    },
    CylinderObstacle {
        x: 400.0,
        y: 650.0,
        z: 150.0,
        radius: 30.0,
    },
    CylinderObstacle {
        x: 800.0,
        y: 800.0,
        z: 150.0,
        radius: 30.0,
    },
    CylinderObstacle {
        x: 750.0,
        y: 350.0,
        z: 150.0,
        radius: 70.0,
    },
    CylinderObstacle {
        x: 150.0,
        y: 350.0,
        z: 150.0,
        radius: 60.0,
    },
    CylinderObstacle {
        x: 920.0,
        y: 600.0,
        z: 150.0,
        radius: 90.0,
    },
    CylinderObstacle {
        x: 920.0,
        y: 200.0,
        z: 150.0,
        radius: 50.0,
    },
];

/// Penalty weights and limits for the constraint costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UavConstraintParams {
    /// Safety margin `D` around each cylinder, metres.
    pub collision_margin: f64,
    pub penalty: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Weight of horizontal turn angles.
    pub a1: f64,
    /// Weight of pitch changes.
    pub a2: f64,
    /// Cost standing in for an infinite penalty.
    pub infeasible_cost: f64,
}

impl Default for UavConstraintParams {
    fn default() -> Self {
        Self {
            collision_margin: 20.0,
            penalty: 10.0,
            h_min: 20.0,
            h_max: 200.0,
            a1: 1.0,
            a2: 1.0,
            infeasible_cost: 1e6,
        }
    }
}

impl UavConstraintParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.h_min < self.h_max) {
            return Err(Error::invalid("h_min must be below h_max"));
        }
        if !(self.collision_margin >= 0.0) || !(self.penalty >= 0.0) {
            return Err(Error::invalid("collision margin and penalty must be non-negative"));
        }
        if !(self.infeasible_cost.is_finite() && self.infeasible_cost > 0.0) {
            return Err(Error::invalid("infeasible cost must be a positive finite number"));
        }
        Ok(())
    }
}

/// Waypoints from start to end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UavPath {
    pub waypoints: Vec<Point3>,
}

impl UavPath {
    /// The interior waypoints flattened back into a candidate vector.
    pub fn interior_flat(&self) -> Vec<f64> {
        let n = self.waypoints.len();
        self.waypoints[1..n - 1].iter().flatten().copied().collect()
    }

    fn segments(&self) -> impl Iterator<Item = (&Point3, &Point3)> {
        self.waypoints.iter().zip(self.waypoints.iter().skip(1))
    }
}

/// `start`, then `n_interior` consecutive `(x, y, z)` triples, then `end`.
pub fn decode_candidate_to_path(candidate: &[f64], n_interior: usize, start: Point3, end: Point3) -> Result<UavPath> {
    if n_interior == 0 {
        return Err(Error::invalid("a UAV path needs at least one interior waypoint"));
    }
    if candidate.len() != 3 * n_interior {
        return Err(Error::invalid(format!(
            "candidate has {} values, expected {}",
            candidate.len(),
            3 * n_interior
        )));
    }
    let mut waypoints = Vec::with_capacity(n_interior + 2);
    waypoints.push(start);
    waypoints.extend(candidate.chunks_exact(3).map(|c| [c[0], c[1], c[2]]));
    waypoints.push(end);
    Ok(UavPath { waypoints })
}

fn dist3(a: &Point3, b: &Point3) -> f64 {
    ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2) + (b[2] - a[2]).powi(2)).sqrt()
}

/// Total Euclidean length.
pub fn path_length_cost(path: &UavPath) -> f64 {
    path.segments().map(|(a, b)| dist3(a, b)).sum()
}

/// Cost of one segment against one cylinder, given the ground-plane distance
/// `d` from the cylinder axis to the segment.
pub fn threat_term(d: f64, radius: f64, params: &UavConstraintParams) -> f64 {
    let outer = params.collision_margin + radius;
    if d >= outer {
        0.0
    } else if d > radius {
        params.penalty * (outer - d)
    } else {
        params.infeasible_cost
    }
}

/// Threat cost summed over every segment and cylinder.
pub fn threat_cost(path: &UavPath, obstacles: &[CylinderObstacle], params: &UavConstraintParams) -> f64 {
    path.segments()
        .map(|(a, b)| {
            obstacles
                .iter()
                .map(|o| {
                    let d = point_segment_distance_2d([o.x, o.y], [a[0], a[1]], [b[0], b[1]]);
                    threat_term(d, o.radius, params)
                })
                .sum::<f64>()
        })
        .sum()
}

/// Altitude band cost for one waypoint height.
pub fn altitude_term(h: f64, params: &UavConstraintParams) -> f64 {
    if h <= 0.0 {
        params.infeasible_cost
    } else if h >= params.h_max {
        params.penalty * (h - params.h_max)
    } else if h > params.h_min {
        0.0
    } else {
        params.penalty * (params.h_min - h)
    }
}

/// Altitude cost summed over all waypoints, using their `z` values.
pub fn altitude_cost(path: &UavPath, params: &UavConstraintParams) -> f64 {
    path.waypoints.iter().map(|p| altitude_term(p[2], params)).sum()
}

/// Unsigned angle between two ground-plane directions; 0 when either is
/// degenerate.
fn turn_angle(u: [f64; 2], v: [f64; 2]) -> f64 {
    if (u[0] == 0.0 && u[1] == 0.0) || (v[0] == 0.0 && v[1] == 0.0) {
        return 0.0;
    }
    let cross = u[0] * v[1] - u[1] * v[0];
    let dot = u[0] * v[0] + u[1] * v[1];
    cross.abs().atan2(dot)
}

/// Weighted sum of horizontal turn angles and pitch changes. The pitch
/// before the first segment is taken as level.
pub fn turn_and_pitch_cost(path: &UavPath, params: &UavConstraintParams) -> f64 {
    let projected: Vec<[f64; 2]> = path.segments().map(|(a, b)| [b[0] - a[0], b[1] - a[1]]).collect();
    let turns: f64 = projected.windows(2).map(|w| turn_angle(w[0], w[1])).sum();
    let mut previous_pitch = 0.0;
    let mut pitch_changes = 0.0;
    for ((a, b), ground) in path.segments().zip(&projected) {
        let pitch = (b[2] - a[2]).atan2(ground[0].hypot(ground[1]));
        pitch_changes += (pitch - previous_pitch).abs();
        previous_pitch = pitch;
    }
    params.a1 * turns + params.a2 * pitch_changes
}

/// The four cost components and their mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UavCosts {
    pub length: f64,
    pub threat: f64,
    pub altitude: f64,
    pub angle: f64,
    pub total: f64,
}

impl UavCosts {
    /// Averages the components, replacing non-finite ones by `sentinel`.
    pub fn from_components(components: [f64; 4], sentinel: f64) -> Self {
        let [length, threat, altitude, angle] = components.map(|c| if c.is_finite() { c } else { sentinel });
        Self {
            length,
            threat,
            altitude,
            angle,
            total: (length + threat + altitude + angle) / 4.0,
        }
    }
}

/// Where altitude is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AltitudeReference {
    /// Waypoint `z` as is.
    #[default]
    Absolute,
    /// Waypoint `z` minus terrain height below it.
    AboveTerrain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisBounds {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub z: [f64; 2],
}

impl Default for AxisBounds {
    fn default() -> Self {
        Self {
            x: [0.0, 1000.0],
            y: [0.0, 1000.0],
            z: [0.0, 200.0],
        }
    }
}

/// A complete UAV planning problem, loadable from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UavScenario {
    pub start: Point3,
    pub end: Point3,
    pub n_interior: usize,
    pub bounds: AxisBounds,
    pub obstacles: Vec<CylinderObstacle>,
    pub constraints: UavConstraintParams,
    pub slope_exponent: SlopeExponent,
    pub altitude_reference: AltitudeReference,
}

impl Default for UavScenario {
    fn default() -> Self {
        Self {
            start: [150.0, 150.0, 50.0],
            end: [900.0, 720.0, 150.0],
            n_interior: 10,
            bounds: AxisBounds::default(),
            obstacles: DEFAULT_OBSTACLES.to_vec(),
            constraints: UavConstraintParams::default(),
            slope_exponent: SlopeExponent::Corrected,
            altitude_reference: AltitudeReference::Absolute,
        }
    }
}

/// The shipped default scenario file.
pub const DEFAULT_SCENARIO_JSON: &str = include_str!("../scenarios/uav_default.json");

impl UavScenario {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let scenario = Self::from_json(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        self.constraints.validate()?;
        if self.n_interior == 0 {
            return Err(Error::invalid("n_interior must be at least 1"));
        }
        if self.obstacles.iter().any(|o| !(o.radius > 0.0)) {
            return Err(Error::invalid("obstacle radius must be positive"));
        }
        let b = &self.bounds;
        for (name, [lo, hi]) in [("x", b.x), ("y", b.y), ("z", b.z)] {
            if !(lo < hi) {
                return Err(Error::invalid(format!("bounds.{name}: need lower < upper")));
            }
        }
        Ok(())
    }

    /// Hills derived from the obstacles: height = top, attenuation = radius.
    pub fn terrain(&self) -> TerrainModel {
        TerrainModel {
            slopes: self
                .obstacles
                .iter()
                .map(|o| Slope {
                    height: o.z,
                    center: [o.x, o.y],
                    attenuation: [o.radius, o.radius],
                })
                .collect(),
            exponent: self.slope_exponent,
        }
    }

    pub fn search_space(&self) -> SearchSpace {
        let b = &self.bounds;
        let lower = (0..self.n_interior).flat_map(|_| [b.x[0], b.y[0], b.z[0]]).collect();
        let upper = (0..self.n_interior).flat_map(|_| [b.x[1], b.y[1], b.z[1]]).collect();
        SearchSpace::new(lower, upper).expect("validated bounds")
    }

    pub fn decode(&self, candidate: &[f64]) -> Result<UavPath> {
        decode_candidate_to_path(candidate, self.n_interior, self.start, self.end)
    }

    pub fn path_costs(&self, path: &UavPath) -> UavCosts {
        let p = &self.constraints;
        let altitude = match self.altitude_reference {
            AltitudeReference::Absolute => altitude_cost(path, p),
            AltitudeReference::AboveTerrain => {
                let terrain = self.terrain();
                path.waypoints
                    .iter()
                    .map(|w| altitude_term(w[2] - terrain.height(w[0], w[1]), p))
                    .sum()
            }
        };
        UavCosts::from_components(
            [
                path_length_cost(path),
                threat_cost(path, &self.obstacles, p),
                altitude,
                turn_and_pitch_cost(path, p),
            ],
            p.infeasible_cost,
        )
    }

    /// Component costs of a candidate.
    pub fn costs(&self, candidate: &[f64]) -> Result<UavCosts> {
        Ok(self.path_costs(&self.decode(candidate)?))
    }

    /// True when no segment enters a cylinder core and no altitude term hit
    /// the sentinel.
    pub fn is_feasible(&self, path: &UavPath) -> bool {
        let p = &self.constraints;
        let threat_ok = path.segments().all(|(a, b)| {
            self.obstacles
                .iter()
                .all(|o| point_segment_distance_2d([o.x, o.y], [a[0], a[1]], [b[0], b[1]]) > o.radius)
        });
        let altitude_ok = match self.altitude_reference {
            AltitudeReference::Absolute => path
                .waypoints
                .iter()
                .all(|w| altitude_term(w[2], p) < p.infeasible_cost),
            AltitudeReference::AboveTerrain => {
                let terrain = self.terrain();
                path.waypoints.iter().all(|w| w[2] - terrain.height(w[0], w[1]) > 0.0)
            }
        };
        threat_ok && altitude_ok
    }
}

/// Total flight cost of a candidate.
pub fn uav_total_cost(candidate: &[f64], scenario: &UavScenario) -> Result<f64> {
    Ok(scenario.costs(candidate)?.total)
}

impl Objective for UavScenario {
    fn dim(&self) -> usize {
        3 * self.n_interior
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        match self.costs(x) {
            Ok(c) => c.total,
            Err(_) => f64::INFINITY,
        }
    }
}
