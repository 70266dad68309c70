//! Reference parameter sets: the 6.4 m x 3.4 m workspace with eight disc
//! obstacles, and the gains used with it.

use crate::controller::ControllerParams;
use crate::geometry::{Obstacle, Workspace, World};
use crate::kinematics::{DisturbanceModel, Pose, RobotParams};
use crate::math::Vec2;
use crate::planner::{FieldMode, PfParams, PlannerParams};
use crate::sim::{Integrator, Scenario, SimConfig};

pub const REFERENCE_GOAL: Vec2 = Vec2::new(2.5, 1.0);

pub fn table1_world() -> World {
    let obstacles = [
        ([-2.0, -0.55], 0.10),
        ([-0.9, 0.85], 0.10),
        ([-0.7, -0.5], 0.35),
        ([-2.1, 0.6], 0.15),
        ([0.4, 0.55], 0.25),
        ([0.7, -0.6], 0.10),
        ([2.0, -0.6], 0.25),
        ([1.8, 0.7], 0.15),
    ];
    World {
        workspace: Workspace::Rectangle {
            center: Vec2::ZERO,
            half_extents: Vec2::new(3.2, 1.7),
        },
        obstacles: obstacles
            .iter()
            .map(|&(c, r)| Obstacle::new(Vec2::from(c), r))
            .collect(),
        robot_radius: 0.2,
        clearance: 0.2,
        margin: 0.1,
        influence: 0.2,
    }
}

pub fn table1_planner() -> PlannerParams {
    PlannerParams::new(0.03, 0.005, REFERENCE_GOAL, FieldMode::Continuous)
}

pub fn table1_controller() -> ControllerParams {
    ControllerParams {
        tube_radius: 0.06,
        gain: 0.1,
        smoothing: 0.005,
        adaptation_rate: 0.1,
        leakage: 0.01,
        bound: 0.03,
        band: 0.005,
        initial_estimate: 0.01,
    }
}

pub fn table1_robot() -> RobotParams {
    RobotParams {
        offset: 0.05,
        radius: 0.2,
        input_limit: 1.5,
    }
}

/// Virtual-point start of the reference closed-loop scenario; the robot
/// faces along +x.
pub const REFERENCE_START: Vec2 = Vec2::new(-2.55, -1.0);

pub fn table1_sim() -> SimConfig {
    SimConfig {
        dt: 0.01,
        duration: 500.0,
        goal_tol: 0.01,
        integrator: Integrator::Rk4,
        input_clamp: None,
        initial_pose: Pose::with_virtual_point(REFERENCE_START, 0.0, table1_robot().offset),
        seed: 2024,
        project_to_margin: false,
    }
}

/// Everything needed for the reference runs, with the sinusoidal disturbance.
pub fn table1_scenario() -> Scenario {
    let world = table1_world();
    let pf = PfParams::reference(&world, REFERENCE_GOAL);
    Scenario {
        world,
        planner: table1_planner(),
        pf,
        controller: table1_controller(),
        robot: table1_robot(),
        disturbance: DisturbanceModel::reference(),
        sim: table1_sim(),
    }
}
