//! Fixed-step simulation of the reference flow and the disturbed closed loop.
//!
//! Controls are computed at each sample instant and held over the step
//! (zero-order hold); the reference and the pose are integrated with the
//! configured scheme, the adaptive estimate with explicit Euler.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::controller::{
    adaptive_update, control_law, transformed_error, z_vector, AdaptiveState, ControllerParams,
};
use crate::error::{positive, NavError, Result};
use crate::geometry::World;
use crate::kinematics::{
    pose_derivative, rotation_matrix_inverse, virtual_point, DisturbanceModel, Pose, RobotParams,
};
use crate::math::Vec2;
use crate::planner::{FieldMode, PfParams, Planner, PlannerParams};

#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    Euler,
    #[default]
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub duration: f64,
    pub goal_tol: f64,
    pub integrator: Integrator,
    /// Optional hard clamp of `|u|`; off by default.
    pub input_clamp: Option<f64>,
    pub initial_pose: Pose,
    /// Seed for start-point sweeps.
    pub seed: u64,
    /// Push the reference back onto the margin boundary after a step that
    /// grazed inside it. Off by default.
    pub project_to_margin: bool,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        positive("sim.dt", self.dt)?;
        positive("sim.goal_tol", self.goal_tol)?;
        if !(self.duration.is_finite() && self.duration >= self.dt) {
            return Err(NavError::InvalidParameter {
                name: "sim.duration",
                reason: "must be finite and >= dt",
            });
        }
        if let Some(c) = self.input_clamp {
            positive("sim.input_clamp", c)?;
        }
        Ok(())
    }

    /// Number of steps covering `duration`.
    pub fn steps(&self) -> usize {
        libm::round(self.duration / self.dt) as usize
    }
}

/// One logged sample. In reference-only runs the pose and virtual point
/// coincide with the reference, the error columns are zero and `u` holds
/// the planner velocity.
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub reference: Vec2,
    pub pose: Pose,
    pub point: Vec2,
    pub error_norm: f64,
    pub xi: f64,
    pub u: Vec2,
    pub estimate: f64,
    /// Obstacle distance of the reference (infinite without obstacles).
    pub clearance_ref: f64,
    /// Obstacle distance of the virtual point.
    pub clearance_act: f64,
}

#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    GoalReached,
    Elapsed,
    TubeViolation {
        t: f64,
        xi: f64,
    },
    /// The field could not be evaluated (singular potential, out of domain).
    Fault {
        t: f64,
        reason: alloc::string::String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub goal: Vec2,
    pub goal_tol: f64,
    pub dt: f64,
    pub termination: Termination,
}

#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub path_length_ref: f64,
    pub path_length_act: f64,
    pub min_clearance_ref: f64,
    pub min_clearance_act: f64,
    pub max_error: f64,
    pub max_input: f64,
    /// First time the virtual point is within `goal_tol` of the goal.
    pub settling_time: Option<f64>,
    pub terminal_error: f64,
    pub tube_violated: bool,
    pub reached_goal: bool,
    pub final_time: f64,
    pub termination: Termination,
}

fn rk4_point(x: Vec2, dt: f64, f: impl Fn(Vec2) -> Result<Vec2>) -> Result<Vec2> {
    let k1 = f(x)?;
    let k2 = f(x + k1 * (0.5 * dt))?;
    let k3 = f(x + k2 * (0.5 * dt))?;
    let k4 = f(x + k3 * dt)?;
    Ok(x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
}

fn step_point(
    integrator: Integrator,
    x: Vec2,
    dt: f64,
    f: impl Fn(Vec2) -> Result<Vec2>,
) -> Result<Vec2> {
    match integrator {
        Integrator::Euler => Ok(x + f(x)? * dt),
        Integrator::Rk4 => rk4_point(x, dt, f),
    }
}

/// Advance the pose over one step with the input held at `u`.
fn step_pose(
    integrator: Integrator,
    pose: &Pose,
    u: Vec2,
    disturbance: &DisturbanceModel,
    t: f64,
    dt: f64,
) -> Pose {
    let rate = |p: &Pose, t: f64| pose_derivative(p, u, disturbance.eval(t));
    match integrator {
        Integrator::Euler => pose.advance(&rate(pose, t), dt),
        Integrator::Rk4 => {
            let k1 = rate(pose, t);
            let k2 = rate(&pose.advance(&k1, 0.5 * dt), t + 0.5 * dt);
            let k3 = rate(&pose.advance(&k2, 0.5 * dt), t + 0.5 * dt);
            let k4 = rate(&pose.advance(&k3, dt), t + dt);
            Pose::new(
                pose.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
                pose.y + dt / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
                pose.theta + dt / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
            )
        }
    }
}

fn project_to_margin(world: &World, x: Vec2) -> Vec2 {
    let nearest = world.obstacle_distance(x);
    match nearest.index {
        Some(i) if nearest.distance < world.margin => {
            let o = &world.obstacles[i];
            match (x - o.center).normalized() {
                Some(dir) => o.center + dir * (world.robot_radius + o.radius + world.margin),
                None => x,
            }
        }
        _ => x,
    }
}

fn check_start(world: &World, x: Vec2) -> Result<()> {
    if world.in_free_space(x, world.margin) {
        Ok(())
    } else {
        Err(NavError::StartOutsideFreeSpace { x: x.x, y: x.y })
    }
}

fn fault(t: f64, e: &NavError) -> Termination {
    use alloc::string::ToString;
    Termination::Fault {
        t,
        reason: e.to_string(),
    }
}

/// Integrate the pure planner flow `ẋ_d = τ(x_d)` from `start`.
///
/// Stops early once the reference is within `goal_tol` of the goal.
pub fn integrate_reference(
    world: &World,
    planner: &Planner,
    start: Vec2,
    cfg: &SimConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    check_start(world, start)?;
    let goal = planner.goal();
    let steps = cfg.steps();
    let mut samples = Vec::new();
    let mut x = start;
    let mut termination = Termination::Elapsed;
    for k in 0..=steps {
        let t = k as f64 * cfg.dt;
        let clearance = world.obstacle_distance(x).distance;
        let velocity = match planner.velocity(world, x) {
            Ok(v) => v,
            Err(e) => {
                termination = fault(t, &e);
                break;
            }
        };
        samples.push(Sample {
            t,
            reference: x,
            pose: Pose::new(x.x, x.y, 0.0),
            point: x,
            error_norm: 0.0,
            xi: 0.0,
            u: velocity,
            estimate: 0.0,
            clearance_ref: clearance,
            clearance_act: clearance,
        });
        if x.distance(goal) <= cfg.goal_tol {
            termination = Termination::GoalReached;
            break;
        }
        if k == steps {
            break;
        }
        let next = match cfg.integrator {
            Integrator::Euler => Ok(x + velocity * cfg.dt),
            Integrator::Rk4 => rk4_point(x, cfg.dt, |p| planner.velocity(world, p)),
        };
        x = match next {
            Ok(n) if cfg.project_to_margin => project_to_margin(world, n),
            Ok(n) => n,
            Err(e) => {
                termination = fault(t, &e);
                break;
            }
        };
    }
    Ok(Trajectory {
        samples,
        goal,
        goal_tol: cfg.goal_tol,
        dt: cfg.dt,
        termination,
    })
}

/// Co-integrate the reference, the disturbed robot under the adaptive
/// tube-following law, and the disturbance-bound estimate.
///
/// The robot starts at `cfg.initial_pose`; the reference starts at its
/// virtual point. Commands halt (and the run ends) once the virtual point
/// is within `goal_tol` of the goal. Leaving the tube ends the run with
/// [`Termination::TubeViolation`].
pub fn integrate_closed_loop(
    world: &World,
    planner: &PlannerParams,
    controller: &ControllerParams,
    robot: &RobotParams,
    disturbance: &DisturbanceModel,
    cfg: &SimConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    robot.validate()?;
    controller.validate(world)?;
    let planner = Planner::TangentCone(*planner);
    let goal = planner.goal();
    let mut pose = cfg.initial_pose;
    let mut reference = virtual_point(robot, &pose);
    check_start(world, reference)?;
    let mut adaptive = AdaptiveState::new(controller);
    let steps = cfg.steps();
    let mut samples = Vec::new();
    let mut termination = Termination::Elapsed;

    for k in 0..=steps {
        let t = k as f64 * cfg.dt;
        let point = virtual_point(robot, &pose);
        let error = point - reference;
        let xi = transformed_error(controller, error);
        let mut sample = Sample {
            t,
            reference,
            pose,
            point,
            error_norm: error.norm(),
            xi,
            u: Vec2::ZERO,
            estimate: adaptive.estimate,
            clearance_ref: world.obstacle_distance(reference).distance,
            clearance_act: world.obstacle_distance(point).distance,
        };
        if xi >= 1.0 {
            samples.push(sample);
            termination = Termination::TubeViolation { t, xi };
            break;
        }
        if point.distance(goal) <= cfg.goal_tol {
            samples.push(sample);
            termination = Termination::GoalReached;
            break;
        }
        let tau_d = match planner.velocity(world, reference) {
            Ok(v) => v,
            Err(e) => {
                samples.push(sample);
                termination = fault(t, &e);
                break;
            }
        };
        let mut u = control_law(
            controller,
            &adaptive,
            robot.offset,
            pose.theta,
            error,
            tau_d,
        )?;
        if let Some(limit) = cfg.input_clamp {
            let n = u.norm();
            if n > limit {
                u = u * (limit / n);
            }
        }
        sample.u = u;
        samples.push(sample);
        if k == steps {
            break;
        }

        let z = z_vector(controller, error)?;
        let next_ref = step_point(cfg.integrator, reference, cfg.dt, |p| {
            planner.velocity(world, p)
        });
        reference = match next_ref {
            Ok(n) if cfg.project_to_margin => project_to_margin(world, n),
            Ok(n) => n,
            Err(e) => {
                termination = fault(t, &e);
                break;
            }
        };
        pose = step_pose(cfg.integrator, &pose, u, disturbance, t, cfg.dt);
        adaptive = adaptive_update(controller, &adaptive, z, cfg.dt);
    }
    Ok(Trajectory {
        samples,
        goal,
        goal_tol: cfg.goal_tol,
        dt: cfg.dt,
        termination,
    })
}

/// Execute the potential-field planner directly on the disturbed robot,
/// `u = R(θ)^-1 τ_pf(x)`, and log the deviation from the undisturbed
/// potential-field path as the tracking error.
///
/// The `xi` column is measured against `tube_radius`.
pub fn pf_closed_loop(
    world: &World,
    pf: &PfParams,
    robot: &RobotParams,
    disturbance: &DisturbanceModel,
    tube_radius: f64,
    cfg: &SimConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    robot.validate()?;
    pf.validate()?;
    positive("tube_radius", tube_radius)?;
    let planner = Planner::PotentialField(*pf);
    let goal = pf.goal;
    let mut pose = cfg.initial_pose;
    let mut reference = virtual_point(robot, &pose);
    check_start(world, reference)?;
    let steps = cfg.steps();
    let mut samples = Vec::new();
    let mut termination = Termination::Elapsed;

    for k in 0..=steps {
        let t = k as f64 * cfg.dt;
        let point = virtual_point(robot, &pose);
        let error = point - reference;
        let mut sample = Sample {
            t,
            reference,
            pose,
            point,
            error_norm: error.norm(),
            xi: error.norm_squared() / (tube_radius * tube_radius),
            u: Vec2::ZERO,
            estimate: 0.0,
            clearance_ref: world.obstacle_distance(reference).distance,
            clearance_act: world.obstacle_distance(point).distance,
        };
        if point.distance(goal) <= cfg.goal_tol {
            samples.push(sample);
            termination = Termination::GoalReached;
            break;
        }
        let velocity = match planner.velocity(world, point) {
            Ok(v) => v,
            Err(e) => {
                samples.push(sample);
                termination = fault(t, &e);
                break;
            }
        };
        let mut u = rotation_matrix_inverse(robot.offset, pose.theta) * velocity;
        if let Some(limit) = cfg.input_clamp {
            let n = u.norm();
            if n > limit {
                u = u * (limit / n);
            }
        }
        sample.u = u;
        samples.push(sample);
        if k == steps {
            break;
        }
        reference = match step_point(cfg.integrator, reference, cfg.dt, |p| {
            planner.velocity(world, p)
        }) {
            Ok(n) => n,
            Err(e) => {
                termination = fault(t, &e);
                break;
            }
        };
        pose = step_pose(cfg.integrator, &pose, u, disturbance, t, cfg.dt);
    }
    Ok(Trajectory {
        samples,
        goal,
        goal_tol: cfg.goal_tol,
        dt: cfg.dt,
        termination,
    })
}

fn path_length(points: impl Iterator<Item = Vec2>) -> f64 {
    let mut total = 0.0;
    let mut prev: Option<Vec2> = None;
    for p in points {
        if let Some(q) = prev {
            total += p.distance(q);
        }
        prev = Some(p);
    }
    total
}

/// Summary statistics of a run. Panics on an empty trajectory.
pub fn compute_metrics(trajectory: &Trajectory) -> Metrics {
    let s = &trajectory.samples;
    assert!(!s.is_empty(), "metrics of an empty trajectory");
    let last = s[s.len() - 1];
    let fold_min = |f: fn(&Sample) -> f64| s.iter().map(f).fold(f64::INFINITY, f64::min);
    let fold_max = |f: fn(&Sample) -> f64| s.iter().map(f).fold(0.0, f64::max);
    let settling_time = s
        .iter()
        .find(|r| r.point.distance(trajectory.goal) <= trajectory.goal_tol)
        .map(|r| r.t);
    Metrics {
        path_length_ref: path_length(s.iter().map(|r| r.reference)),
        path_length_act: path_length(s.iter().map(|r| r.point)),
        min_clearance_ref: fold_min(|r| r.clearance_ref),
        min_clearance_act: fold_min(|r| r.clearance_act),
        max_error: fold_max(|r| r.error_norm),
        max_input: fold_max(|r| r.u.norm()),
        settling_time,
        terminal_error: last.point.distance(trajectory.goal),
        tube_violated: matches!(trajectory.termination, Termination::TubeViolation { .. })
            || s.iter().any(|r| r.xi >= 1.0),
        reached_goal: trajectory.termination == Termination::GoalReached,
        final_time: last.t,
        termination: trajectory.termination.clone(),
    }
}

/// Planner used for a reference-only run.
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlannerChoice {
    /// Continuous tangent-cone field.
    Tc,
    /// Discontinuous tangent-cone field.
    TcDisc,
    /// Potential-field baseline.
    Pf,
}

impl PlannerChoice {
    pub fn name(&self) -> &'static str {
        match self {
            PlannerChoice::Tc => "tc",
            PlannerChoice::TcDisc => "tc-disc",
            PlannerChoice::Pf => "pf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunKind {
    Reference(PlannerChoice),
    ClosedLoop,
    PfClosedLoop,
}

/// A complete, immutable run description.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub world: World,
    pub planner: PlannerParams,
    pub pf: PfParams,
    pub controller: ControllerParams,
    pub robot: RobotParams,
    pub disturbance: DisturbanceModel,
    pub sim: SimConfig,
}

impl Scenario {
    /// Parameter invariants (the world's separation assumptions are checked
    /// separately by [`World::validate`]).
    pub fn validate(&self) -> Result<()> {
        self.planner.validate(&self.world)?;
        self.pf.validate()?;
        self.controller.validate(&self.world)?;
        self.robot.validate()?;
        self.sim.validate()
    }

    pub fn planner_for(&self, choice: PlannerChoice) -> Planner {
        match choice {
            PlannerChoice::Tc => Planner::TangentCone(PlannerParams {
                mode: FieldMode::Continuous,
                ..self.planner
            }),
            PlannerChoice::TcDisc => Planner::TangentCone(PlannerParams {
                mode: FieldMode::Discontinuous,
                ..self.planner
            }),
            PlannerChoice::Pf => Planner::PotentialField(self.pf),
        }
    }

    /// Run from the configured initial pose.
    pub fn run(&self, kind: RunKind) -> Result<Trajectory> {
        self.run_with(kind, &self.sim)
    }

    /// Run with the reference starting at `start` (the robot keeps the
    /// configured heading and is placed so its virtual point is at `start`).
    pub fn run_from(&self, kind: RunKind, start: Vec2) -> Result<Trajectory> {
        let sim = SimConfig {
            initial_pose: Pose::with_virtual_point(
                start,
                self.sim.initial_pose.theta,
                self.robot.offset,
            ),
            ..self.sim
        };
        match kind {
            RunKind::Reference(choice) => self.reference(choice, start, &sim),
            _ => self.run_with(kind, &sim),
        }
    }

    /// The discontinuous field only acts on the margin boundary itself, so a
    /// fixed step crosses into the margin. Its runs use explicit Euler (no
    /// intermediate stages inside the margin) and always project back.
    fn reference(&self, choice: PlannerChoice, start: Vec2, sim: &SimConfig) -> Result<Trajectory> {
        let sim = if choice == PlannerChoice::TcDisc {
            SimConfig {
                integrator: Integrator::Euler,
                project_to_margin: true,
                ..*sim
            }
        } else {
            *sim
        };
        integrate_reference(&self.world, &self.planner_for(choice), start, &sim)
    }

    fn run_with(&self, kind: RunKind, sim: &SimConfig) -> Result<Trajectory> {
        match kind {
            RunKind::Reference(choice) => {
                let start = virtual_point(&self.robot, &sim.initial_pose);
                self.reference(choice, start, sim)
            }
            RunKind::ClosedLoop => integrate_closed_loop(
                &self.world,
                &self.planner,
                &self.controller,
                &self.robot,
                &self.disturbance,
                sim,
            ),
            RunKind::PfClosedLoop => pf_closed_loop(
                &self.world,
                &self.pf,
                &self.robot,
                &self.disturbance,
                self.controller.tube_radius,
                sim,
            ),
        }
    }
}

pub type RunResult = Result<(Trajectory, Metrics)>;

/// One independent run per start, in input order. Errors are collected
/// per run; the batch never aborts.
pub fn batch_run(scenario: &Scenario, kind: RunKind, starts: &[Vec2]) -> Vec<RunResult> {
    starts
        .iter()
        .map(|&s| {
            scenario.run_from(kind, s).map(|t| {
                let m = compute_metrics(&t);
                (t, m)
            })
        })
        .collect()
}

/// `count` points drawn uniformly from the eroded free space by rejection
/// sampling over the workspace bounding box.
pub fn sample_free_starts(world: &World, count: usize, seed: u64) -> Vec<Vec2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = world.workspace.bounds();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = Vec2::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y));
        if world.in_free_space(p, world.margin) {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Workspace;
    use crate::scenarios::{table1_scenario, table1_sim, table1_world, REFERENCE_GOAL};
    use alloc::vec;

    fn open_world() -> World {
        World {
            workspace: Workspace::Rectangle {
                center: Vec2::ZERO,
                half_extents: Vec2::new(3.2, 1.7),
            },
            obstacles: vec![],
            robot_radius: 0.2,
            clearance: 0.2,
            margin: 0.1,
            influence: 0.2,
        }
    }

    #[test]
    fn start_at_goal_is_single_row() {
        let s = table1_scenario();
        let t = integrate_reference(
            &s.world,
            &s.planner_for(PlannerChoice::Tc),
            REFERENCE_GOAL,
            &s.sim,
        )
        .unwrap();
        assert_eq!(t.samples.len(), 1);
        assert_eq!(t.termination, Termination::GoalReached);
        let m = compute_metrics(&t);
        assert_eq!(m.path_length_ref, 0.0);
        assert!(m.reached_goal);
    }

    #[test]
    fn start_outside_free_space_is_rejected() {
        let s = table1_scenario();
        let bad = s.world.obstacles[0].center;
        assert!(matches!(
            integrate_reference(&s.world, &s.planner_for(PlannerChoice::Tc), bad, &s.sim),
            Err(NavError::StartOutsideFreeSpace { .. })
        ));
    }

    #[test]
    fn straight_run_path_length() {
        let samples: Vec<Sample> = (0..=100)
            .map(|k| {
                let t = k as f64 * 0.01;
                let p = Vec2::new(0.3 * t, 0.0);
                Sample {
                    t,
                    reference: p,
                    pose: Pose::new(p.x, p.y, 0.0),
                    point: p,
                    error_norm: 0.0,
                    xi: 0.0,
                    u: Vec2::new(0.3, 0.0),
                    estimate: 0.0,
                    clearance_ref: 1.0,
                    clearance_act: 1.0,
                }
            })
            .collect();
        let t = Trajectory {
            samples,
            goal: Vec2::new(5.0, 0.0),
            goal_tol: 0.01,
            dt: 0.01,
            termination: Termination::Elapsed,
        };
        let m = compute_metrics(&t);
        assert!((m.path_length_ref - 0.3 * 100.0 * 0.01).abs() < 1e-9);
        assert!(!m.reached_goal);
        assert_eq!(m.settling_time, None);
    }

    #[test]
    fn pf_without_repulsion_goes_straight() {
        let w = open_world();
        let mut pf = PfParams::reference(&w, Vec2::new(1.0, 0.5));
        pf.k_r = 0.0;
        let start = Vec2::new(-2.0, -1.0);
        let mut cfg = table1_sim();
        cfg.duration = 1000.0;
        let t = integrate_reference(&w, &Planner::PotentialField(pf), start, &cfg).unwrap();
        assert_eq!(t.termination, Termination::GoalReached);
        let dir = (pf.goal - start).normalized().unwrap();
        for s in &t.samples {
            let off = s.reference - start;
            assert!((off.x * dir.y - off.y * dir.x).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_loop_without_disturbance_tracks_tightly() {
        let mut s = table1_scenario();
        s.disturbance = DisturbanceModel::None;
        let t = s.run(RunKind::ClosedLoop).unwrap();
        let m = compute_metrics(&t);
        assert!(m.reached_goal, "{:?}", m.termination);
        assert!(m.max_error < 1e-3, "max error {}", m.max_error);
    }

    #[test]
    fn batch_of_nothing_is_empty() {
        let s = table1_scenario();
        assert!(batch_run(&s, RunKind::Reference(PlannerChoice::Tc), &[]).is_empty());
    }

    #[test]
    fn batch_collects_errors_without_aborting() {
        let s = table1_scenario();
        let starts = [s.world.obstacles[0].center, Vec2::new(-2.5, 1.2)];
        let out = batch_run(&s, RunKind::Reference(PlannerChoice::Tc), &starts);
        assert_eq!(out.len(), 2);
        assert!(out[0].is_err());
        assert!(out[1].as_ref().unwrap().1.reached_goal);
    }

    #[test]
    fn seeded_sampling_is_reproducible_and_valid() {
        let w = table1_world();
        let a = sample_free_starts(&w, 50, 11);
        let b = sample_free_starts(&w, 50, 11);
        assert_eq!(a, b);
        assert_ne!(a, sample_free_starts(&w, 50, 12));
        assert!(a.iter().all(|p| w.in_free_space(*p, w.margin)));
    }

    #[test]
    fn input_clamp_limits_norm() {
        let mut s = table1_scenario();
        s.sim.input_clamp = Some(0.3);
        s.sim.duration = 20.0;
        let t = s.run(RunKind::ClosedLoop).unwrap();
        assert!(t.samples.iter().all(|r| r.u.norm() <= 0.3 + 1e-12));
    }

    #[test]
    fn project_to_margin_moves_point_onto_boundary() {
        let w = table1_world();
        let o = w.obstacles[2];
        let inside = o.center + Vec2::new(w.robot_radius + o.radius + 0.05, 0.0);
        let p = project_to_margin(&w, inside);
        assert!((w.obstacle_distance(p).distance - w.margin).abs() < 1e-12);
        let free = Vec2::new(2.5, 1.0);
        assert_eq!(project_to_margin(&w, free), free);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let mut cfg = table1_sim();
        cfg.dt = 0.0;
        assert!(cfg.validate().is_err());
        cfg = table1_sim();
        cfg.duration = 0.001;
        assert!(cfg.validate().is_err());
        cfg = table1_sim();
        cfg.goal_tol = -1.0;
        assert!(cfg.validate().is_err());
    }
}
