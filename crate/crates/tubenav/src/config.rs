//! Scenario configuration files.
//!
//! The format is TOML with the sections `[world]`, `[[obstacle]]`,
//! `[planner]` (optionally `[planner.potential_field]`), `[controller]`,
//! `[robot]`, `[disturbance]` and `[sim]`, plus an optional top-level
//! `output_dir`. `[world]` may instead name a separate world file with
//! `file = "..."`, resolved relative to the including file; that file holds
//! `[world]` and `[[obstacle]]` only.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use toml::de::{DeTable, DeValue};
use toml::Spanned;

use tubenav_core::{
    ControllerParams, DisturbanceModel, FieldMode, Integrator, NavError, Obstacle, PfParams,
    PlannerParams, Pose, RobotParams, Scenario, SimConfig, Sinusoid, Vec2, Workspace, World,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    pub world: WorldSection,
    #[serde(default, rename = "obstacle", skip_serializing_if = "Vec::is_empty")]
    pub obstacles: Vec<ObstacleEntry>,
    pub planner: PlannerSection,
    pub controller: ControllerParams,
    pub robot: RobotParams,
    #[serde(default)]
    pub disturbance: DisturbanceSection,
    pub sim: SimSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkspaceKind {
    Rectangle,
    Disc,
}

/// Either a reference to a world file or the inline world. All keys are
/// optional at the syntax level so that missing ones can be reported by
/// name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workspace: Option<WorkspaceKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_extents: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clearance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub influence: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleEntry {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerSection {
    pub alpha: f64,
    pub beta: f64,
    pub goal: [f64; 2],
    #[serde(default)]
    pub mode: FieldMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential_field: Option<PfSection>,
}

/// Baseline gains; the workspace barrier defaults to the eroded workspace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PfSection {
    pub k_a: f64,
    pub k_r: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semi_axes: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DisturbanceSection {
    #[default]
    None,
    /// `0.01 [sin(0.2 t) + 1, cos(0.3 t) - 2]`.
    Reference,
    Sinusoidal {
        gain: f64,
        linear: Sinusoid,
        angular: Sinusoid,
    },
}

impl DisturbanceSection {
    pub fn model(&self) -> DisturbanceModel {
        match *self {
            DisturbanceSection::None => DisturbanceModel::None,
            DisturbanceSection::Reference => DisturbanceModel::reference(),
            DisturbanceSection::Sinusoidal {
                gain,
                linear,
                angular,
            } => DisturbanceModel::Sinusoidal {
                gain,
                linear,
                angular,
            },
        }
    }
}

fn default_dt() -> f64 {
    0.01
}

fn default_duration() -> f64 {
    500.0
}

fn default_goal_tol() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_duration")]
    pub duration: f64,
    #[serde(default = "default_goal_tol")]
    pub goal_tol: f64,
    #[serde(default)]
    pub integrator: Integrator,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_clamp: Option<f64>,
    /// Virtual-point start.
    pub start: [f64; 2],
    #[serde(default)]
    pub heading: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub project_to_margin: bool,
}

/// A configuration error with the offending field and, when it can be
/// located, the file and line.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub file: Option<PathBuf>,
    pub line: Option<usize>,
    pub field: String,
    pub reason: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{}:", file.display())?;
        }
        if let Some(line) = self.line {
            write!(f, "{line}:")?;
        }
        if self.file.is_some() || self.line.is_some() {
            f.write_str(" ")?;
        }
        if self.field.is_empty() {
            f.write_str(&self.reason)
        } else {
            write!(f, "{}: {}", self.field, self.reason)
        }
    }
}

impl std::error::Error for ConfigError {}

/// Spanned view of a document, used to attach line numbers to field paths.
struct Source<'a> {
    text: &'a str,
    table: Option<Spanned<DeTable<'a>>>,
}

impl<'a> Source<'a> {
    fn new(text: &'a str) -> Self {
        Source {
            text,
            table: DeTable::parse(text).ok(),
        }
    }

    fn line_of(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())]
            .matches('\n')
            .count()
            + 1
    }

    /// Line of a dotted path such as `controller.gain` or `obstacle[2].radius`.
    /// Falls back to the closest existing ancestor.
    fn locate(&self, path: &str) -> Option<usize> {
        let mut table: &DeTable = self.table.as_ref()?.get_ref();
        let mut found: Option<usize> = None;
        for part in path.split('.') {
            let (key, index) = match part.split_once('[') {
                Some((k, rest)) => (k, rest.trim_end_matches(']').parse::<usize>().ok()),
                None => (part, None),
            };
            let Some((k, v)) = table.iter().find(|(k, _)| k.get_ref() == key) else {
                break;
            };
            found = Some(k.span().start);
            let mut value = v.get_ref();
            if let Some(i) = index {
                let DeValue::Array(items) = value else { break };
                let Some(item) = items.get(i) else { break };
                found = Some(item.span().start);
                value = item.get_ref();
            }
            match value {
                DeValue::Table(t) => table = t,
                _ => break,
            }
        }
        found.map(|o| self.line_of(o))
    }

    /// Path of the last key starting at or before `offset`. Section values
    /// only span their headers, so containment cannot be used.
    fn path_at(&self, offset: usize) -> String {
        fn flatten(t: &DeTable, prefix: &str, out: &mut Vec<(usize, String)>) {
            for (k, v) in t.iter() {
                let path = if prefix.is_empty() {
                    k.get_ref().to_string()
                } else {
                    format!("{prefix}.{}", k.get_ref())
                };
                out.push((k.span().start, path.clone()));
                match v.get_ref() {
                    DeValue::Table(inner) => flatten(inner, &path, out),
                    DeValue::Array(items) => {
                        for (i, item) in items.iter().enumerate() {
                            if let DeValue::Table(inner) = item.get_ref() {
                                let p = format!("{path}[{i}]");
                                out.push((item.span().start, p.clone()));
                                flatten(inner, &p, out);
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        let mut keys = Vec::new();
        if let Some(t) = &self.table {
            flatten(t.get_ref(), "", &mut keys);
        }
        keys.into_iter()
            .filter(|(start, _)| *start <= offset)
            .max_by_key(|(start, _)| *start)
            .map(|(_, path)| path)
            .unwrap_or_default()
    }

    fn error(&self, field: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError {
            file: None,
            line: self.locate(field),
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    fn toml_error(&self, err: toml::de::Error) -> ConfigError {
        let (line, field) = match err.span() {
            Some(span) => (Some(self.line_of(span.start)), self.path_at(span.start)),
            None => (None, String::new()),
        };
        ConfigError {
            file: None,
            line,
            field,
            reason: err.message().trim().to_string(),
        }
    }
}

/// Parse a configuration document. World file references are resolved
/// against `base` (the directory of the including file).
pub fn parse_config(text: &str, base: Option<&Path>) -> Result<ScenarioConfig, ConfigError> {
    let source = Source::new(text);
    let config: ScenarioConfig = toml::from_str(text).map_err(|e| source.toml_error(e))?;
    config.resolve(&source, base)?;
    Ok(config)
}

/// Read and parse a configuration file; errors carry the file name.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        file: Some(path.to_path_buf()),
        line: None,
        field: String::new(),
        reason: format!("cannot read file: {e}"),
    })?;
    parse_config(&text, path.parent()).map_err(|mut e| {
        if e.file.is_none() {
            e.file = Some(path.to_path_buf());
        }
        e
    })
}

/// Serialize a configuration; `parse_config(&emit_config(c))` reproduces `c`.
pub fn emit_config(config: &ScenarioConfig) -> String {
    toml::to_string(config).expect("configuration values are always representable")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorldFile {
    world: WorldSection,
    #[serde(default, rename = "obstacle")]
    obstacles: Vec<ObstacleEntry>,
}

fn require<T: Copy>(source: &Source, value: Option<T>, field: &str) -> Result<T, ConfigError> {
    value.ok_or_else(|| ConfigError {
        file: None,
        line: source.locate("world"),
        field: field.to_string(),
        reason: "missing required key".into(),
    })
}

fn positive(source: &Source, field: &str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(source.error(field, format!("must be positive and finite (got {value})")))
    }
}

/// Field path in the file for a core parameter name.
fn field_path(name: &str) -> String {
    match name.strip_prefix("pf.") {
        Some(rest) => format!("planner.potential_field.{rest}"),
        None => name.to_string(),
    }
}

fn nav_error(source: &Source, err: NavError) -> ConfigError {
    match err {
        NavError::InvalidParameter { name, reason } => source.error(&field_path(name), reason),
        other => source.error("", other.to_string()),
    }
}

impl ScenarioConfig {
    /// Load the referenced world file (if any) and check every parameter
    /// invariant. Obstacle separation is not checked here; see
    /// [`World::validate`].
    fn resolve(&self, source: &Source, base: Option<&Path>) -> Result<(), ConfigError> {
        self.build_world(source, base)?;
        self.to_scenario_with(source, base).map(|_| ())
    }

    /// The world, loading the world file if one is referenced.
    pub fn world(&self, base: Option<&Path>) -> Result<World, ConfigError> {
        let text = String::new();
        self.build_world(&Source::new(&text), base)
    }

    fn build_world(&self, source: &Source, base: Option<&Path>) -> Result<World, ConfigError> {
        if let Some(file) = &self.world.file {
            let inline = WorldSection {
                file: None,
                ..self.world.clone()
            };
            if inline != WorldSection::default() || !self.obstacles.is_empty() {
                return Err(source.error(
                    "world.file",
                    "a world file reference excludes inline world keys and [[obstacle]] entries",
                ));
            }
            let path = base
                .map(|b| b.join(file))
                .unwrap_or_else(|| PathBuf::from(file));
            let text = std::fs::read_to_string(&path).map_err(|e| {
                source.error("world.file", format!("cannot read {}: {e}", path.display()))
            })?;
            let inner = Source::new(&text);
            let wf: WorldFile = toml::from_str(&text).map_err(|e| ConfigError {
                file: Some(path.clone()),
                ..inner.toml_error(e)
            })?;
            if wf.world.file.is_some() {
                return Err(ConfigError {
                    file: Some(path),
                    ..inner.error("world.file", "world files cannot be nested")
                });
            }
            let nested = ScenarioConfig {
                world: wf.world,
                obstacles: wf.obstacles,
                ..self.clone()
            };
            return nested.inline_world(&inner).map_err(|e| ConfigError {
                file: Some(path),
                ..e
            });
        }
        self.inline_world(source)
    }

    fn inline_world(&self, source: &Source) -> Result<World, ConfigError> {
        let w = &self.world;
        let kind = require(source, w.workspace, "world.workspace")?;
        let center = Vec2::from(w.center.unwrap_or([0.0, 0.0]));
        let workspace = match kind {
            WorkspaceKind::Rectangle => {
                if w.radius.is_some() {
                    return Err(source.error("world.radius", "only valid for a disc workspace"));
                }
                let he = require(source, w.half_extents, "world.half_extents")?;
                positive(source, "world.half_extents", he[0])?;
                positive(source, "world.half_extents", he[1])?;
                Workspace::Rectangle {
                    center,
                    half_extents: Vec2::from(he),
                }
            }
            WorkspaceKind::Disc => {
                if w.half_extents.is_some() {
                    return Err(
                        source.error("world.half_extents", "only valid for a rectangle workspace")
                    );
                }
                let radius = require(source, w.radius, "world.radius")?;
                positive(source, "world.radius", radius)?;
                Workspace::Disc { center, radius }
            }
        };
        let clearance = require(source, w.clearance, "world.clearance")?;
        let margin = require(source, w.margin, "world.margin")?;
        let influence = require(source, w.influence, "world.influence")?;
        positive(source, "world.margin", margin)?;
        if !(margin < influence) {
            return Err(source.error(
                "world.influence",
                format!(
                    "must exceed the margin (margin {margin} < influence {influence} required)"
                ),
            ));
        }
        if !(influence <= clearance) {
            return Err(source.error(
                "world.influence",
                format!(
                    "must not exceed the clearance (influence {influence} <= clearance {clearance} required)"
                ),
            ));
        }
        positive(source, "robot.radius", self.robot.radius)?;
        let mut obstacles = Vec::with_capacity(self.obstacles.len());
        for (i, o) in self.obstacles.iter().enumerate() {
            positive(source, &format!("obstacle[{i}].radius"), o.radius)?;
            if !(o.center[0].is_finite() && o.center[1].is_finite()) {
                return Err(source.error(&format!("obstacle[{i}].center"), "must be finite"));
            }
            obstacles.push(Obstacle::new(Vec2::from(o.center), o.radius));
        }
        Ok(World {
            workspace,
            obstacles,
            robot_radius: self.robot.radius,
            clearance,
            margin,
            influence,
        })
    }

    /// The validated runnable scenario.
    pub fn to_scenario(&self, base: Option<&Path>) -> Result<Scenario, ConfigError> {
        let text = String::new();
        self.to_scenario_with(&Source::new(&text), base)
    }

    fn to_scenario_with(
        &self,
        source: &Source,
        base: Option<&Path>,
    ) -> Result<Scenario, ConfigError> {
        let world = self.build_world(source, base)?;
        let goal = Vec2::from(self.planner.goal);
        let planner = PlannerParams::new(
            self.planner.alpha,
            self.planner.beta,
            goal,
            self.planner.mode,
        );
        let mut pf = PfParams::reference(&world, goal);
        if let Some(p) = &self.planner.potential_field {
            pf.k_a = p.k_a;
            pf.k_r = p.k_r;
            if let Some(e) = p.exponent {
                pf.exponent = e;
            }
            if let Some(a) = p.semi_axes {
                pf.semi_axes = Vec2::from(a);
            }
            if let Some(c) = p.center {
                pf.center = Vec2::from(c);
            }
        }
        let s = &self.sim;
        if !(s.heading.is_finite()) {
            return Err(source.error("sim.heading", "must be finite"));
        }
        let start = Vec2::from(s.start);
        let sim = SimConfig {
            dt: s.dt,
            duration: s.duration,
            goal_tol: s.goal_tol,
            integrator: s.integrator,
            input_clamp: s.input_clamp,
            initial_pose: Pose::with_virtual_point(start, s.heading, self.robot.offset),
            seed: s.seed,
            project_to_margin: s.project_to_margin,
        };
        let scenario = Scenario {
            world,
            planner,
            pf,
            controller: self.controller,
            robot: self.robot,
            disturbance: self.disturbance.model(),
            sim,
        };
        scenario.validate().map_err(|e| nav_error(source, e))?;
        if let DisturbanceSection::Sinusoidal {
            gain,
            linear,
            angular,
        } = self.disturbance
        {
            let all = [
                gain,
                linear.amplitude,
                linear.frequency,
                linear.phase,
                linear.offset,
                angular.amplitude,
                angular.frequency,
                angular.phase,
                angular.offset,
            ];
            if !all.iter().all(|v| v.is_finite()) {
                return Err(source.error("disturbance", "all values must be finite"));
            }
        }
        if !scenario.world.in_free_space(start, scenario.world.margin) {
            return Err(source.error(
                "sim.start",
                "must lie in the free space (outside every obstacle margin, inside the eroded workspace)",
            ));
        }
        Ok(scenario)
    }
}
