//! Scenario documents: JSON input describing the area, the stations and the
//! publication schedule of one simulation run.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{self, Mode};
use crate::topic::TopicHierarchy;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_sq(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn distance(self, other: Point) -> f64 {
        self.distance_sq(other).sqrt()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Area {
    pub width: f64,
    pub height: f64,
}

impl Area {
    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }

    pub fn clamp(&self, p: Point) -> Point {
        Point::new(p.x.clamp(0.0, self.width), p.y.clamp(0.0, self.height))
    }
}

/// How a station moves. Speeds are in distance units per step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum MobilitySpec {
    #[default]
    Static,
    /// Repeatedly pick a uniform destination and a uniform speed in
    /// `[speed_min, speed_max]`, travel there, pause, repeat.
    RandomWaypoint {
        speed_min: f64,
        speed_max: f64,
        #[serde(default)]
        pause_steps: u64,
    },
    /// Visit the listed waypoints in a loop at constant speed, starting
    /// from the first one.
    Patrol { waypoints: Vec<Point>, speed: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeConfig {
    pub id: u32,
    #[serde(default)]
    pub altruistic: bool,
    #[serde(default)]
    pub subscriptions: Vec<String>,
    /// Drawn uniformly in the area when absent (patrols start at their
    /// first waypoint).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<Point>,
    #[serde(default)]
    pub mobility: MobilitySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduledPublication {
    pub step: u64,
    pub node: u32,
    pub topic: String,
    #[serde(default)]
    pub payload: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub steps: u64,
    pub area: Area,
    pub radio_range: f64,
    /// `.sm` file, relative to the scenario file's directory.
    pub hierarchy: PathBuf,
    pub nodes: Vec<NodeConfig>,
    #[serde(default)]
    pub publications: Vec<ScheduledPublication>,
}

/// Every problem found in a scenario.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid scenario:\n  {}", .violations.join("\n  "))]
pub struct ConfigError {
    pub violations: Vec<String>,
}

impl ConfigError {
    pub fn single(message: impl Into<String>) -> Self {
        Self {
            violations: vec![message.into()],
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Config(#[from] ConfigError),
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::single(format!("malformed scenario: {e}")))
    }

    /// Checks the scenario against `h`, collecting every violation.
    pub fn validate(&self, h: &TopicHierarchy) -> Result<(), ConfigError> {
        let mut v = Vec::new();
        let finite_pos = |x: f64| x.is_finite() && x > 0.0;

        if !finite_pos(self.area.width) || !finite_pos(self.area.height) {
            v.push(format!(
                "area must have positive finite width and height, got {}x{}",
                self.area.width, self.area.height
            ));
        }
        if !(self.radio_range.is_finite() && self.radio_range >= 0.0) {
            v.push(format!("radio_range must be finite and non-negative, got {}", self.radio_range));
        }

        let mut ids = BTreeSet::new();
        for node in &self.nodes {
            let who = format!("node {}", node.id);
            if !ids.insert(node.id) {
                v.push(format!("{who}: duplicate node id"));
            }
            for code in &node.subscriptions {
                if !h.contains(code) {
                    v.push(format!("{who}: unknown subscription '{code}'"));
                }
            }
            if let Some(p) = node.position {
                if !self.area.contains(p) {
                    v.push(format!("{who}: position {p} outside the area"));
                }
            }
            match &node.mobility {
                MobilitySpec::Static => {}
                MobilitySpec::RandomWaypoint {
                    speed_min,
                    speed_max,
                    ..
                } => {
                    if !(speed_min.is_finite() && speed_max.is_finite() && 0.0 < *speed_min && speed_min <= speed_max) {
                        v.push(format!(
                            "{who}: random_waypoint needs 0 < speed_min <= speed_max, got {speed_min}..{speed_max}"
                        ));
                    }
                }
                MobilitySpec::Patrol { waypoints, speed } => {
                    if waypoints.is_empty() {
                        v.push(format!("{who}: patrol needs at least one waypoint"));
                    }
                    if !finite_pos(*speed) {
                        v.push(format!("{who}: patrol speed must be positive, got {speed}"));
                    }
                    for w in waypoints {
                        if !self.area.contains(*w) {
                            v.push(format!("{who}: waypoint {w} outside the area"));
                        }
                    }
                }
            }
        }

        for (i, p) in self.publications.iter().enumerate() {
            let which = format!("publication #{i}");
            if !ids.contains(&p.node) {
                v.push(format!("{which}: unknown node {}", p.node));
            }
            if !h.contains(&p.topic) {
                v.push(format!("{which}: unknown topic '{}'", p.topic));
            }
        }

        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { violations: v })
        }
    }
}

/// Reads a scenario and the hierarchy it points at. The `.sm` file must
/// parse and validate in permissive mode.
pub fn load_scenario(path: &Path) -> Result<(ScenarioConfig, TopicHierarchy), LoadError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| LoadError::Io { path, source }
    };
    let text = fs::read_to_string(path).map_err(io(path))?;
    let config = ScenarioConfig::from_json(&text)?;

    let sm_path = path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join(&config.hierarchy);
    let source = fs::read_to_string(&sm_path).map_err(io(&sm_path))?;
    let describe = |diags: Vec<dsl::Diagnostic>| ConfigError {
        violations: diags
            .iter()
            .map(|d| format!("{}: {d}", sm_path.display()))
            .collect(),
    };
    let model = dsl::parse(&source).map_err(describe)?;
    let diags: Vec<_> = dsl::validate(&model, Mode::Permissive)
        .into_iter()
        .filter(dsl::Diagnostic::is_error)
        .collect();
    if !diags.is_empty() {
        return Err(describe(diags).into());
    }
    let h = TopicHierarchy::from_model(&model).map_err(|e| ConfigError::single(e.to_string()))?;

    config.validate(&h)?;
    Ok((config, h))
}
