//! Deterministic 2D navigation among disc obstacles: a tangent-cone
//! velocity planner, an adaptive tube-following controller for a
//! differential-drive robot, and a fixed-step simulator.
//!
//! The crate is `no_std` with `alloc`.

#![no_std]
// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod controller;
pub mod error;
pub mod geometry;
pub mod kinematics;
pub mod math;
pub mod planner;
pub mod scenarios;
pub mod sim;

pub use controller::{AdaptiveState, ControllerParams, ProjectionCase};
pub use error::{NavError, Result};
pub use geometry::{Obstacle, ValidationReport, Violation, Workspace, World};
pub use kinematics::{DisturbanceModel, Pose, RobotParams, Sinusoid};
pub use math::{Mat2, Vec2};
pub use planner::{FieldMode, PfParams, Planner, PlannerParams};
pub use sim::{
    Integrator, Metrics, PlannerChoice, RunKind, Sample, Scenario, SimConfig, Termination,
    Trajectory,
};
