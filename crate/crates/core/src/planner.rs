//! Tangent-cone navigation field and the potential-field baseline.
//!
//! The nominal field drives straight at the goal with speed saturated at
//! `alpha`. Inside an obstacle's influence region, when the nominal field
//! points toward the obstacle, its component along the bearing is scaled
//! down by the bump so that on the margin boundary the field is tangent.

use crate::error::{positive, NavError, Result};
use crate::geometry::{Workspace, World};
use crate::math::{Mat2, Vec2};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

/// How far below the margin the field still accepts a query. Fixed-step
/// integrators may graze the margin boundary by a rounding-sized amount.
pub const DOMAIN_SLACK: f64 = 1e-6;

/// Width of the band around the margin boundary in which the
/// discontinuous variant projects.
pub const BOUNDARY_BAND: f64 = 1e-9;

const UNIT_TOLERANCE: f64 = 1e-9;

#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FieldMode {
    /// Bump-blended projection over the influence region; continuous.
    #[default]
    Continuous,
    /// Hard projection only on the margin boundary; discontinuous.
    Discontinuous,
}

#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlannerParams {
    /// Speed saturation level (m/s).
    pub alpha: f64,
    /// Softening length (m).
    pub beta: f64,
    pub goal: Vec2,
    pub mode: FieldMode,
}

impl PlannerParams {
    pub fn new(alpha: f64, beta: f64, goal: Vec2, mode: FieldMode) -> Self {
        PlannerParams {
            alpha,
            beta,
            goal,
            mode,
        }
    }

    /// Positive gains and a goal strictly inside the eroded free space.
    pub fn validate(&self, world: &World) -> Result<()> {
        positive("planner.alpha", self.alpha)?;
        positive("planner.beta", self.beta)?;
        let depth = world.workspace_erosion_distance(self.goal);
        let clear = world.obstacle_distance(self.goal).distance;
        if !(depth > world.margin && clear > world.margin) {
            return Err(NavError::InvalidParameter {
                name: "planner.goal",
                reason: "must lie in the interior of the eroded free space",
            });
        }
        Ok(())
    }
}

/// Saturated motion-to-goal field `-alpha (x - x*) / sqrt(|x - x*|^2 + beta^2)`.
pub fn nominal_field(params: &PlannerParams, x: Vec2) -> Vec2 {
    let e = x - params.goal;
    let gain = params.alpha / libm::hypot(e.norm(), params.beta);
    e * -gain
}

/// `I - phi b b^T`.
pub fn projection_matrix(phi: f64, b: Vec2) -> Result<Mat2> {
    let n = b.norm();
    if !((n - 1.0).abs() <= UNIT_TOLERANCE) {
        return Err(NavError::NotUnitVector { norm: n });
    }
    if !(0.0..=1.0).contains(&phi) {
        return Err(NavError::InvalidParameter {
            name: "phi",
            reason: "bump value must lie in [0, 1]",
        });
    }
    Ok(Mat2::IDENTITY - b.outer(b) * phi)
}

/// Planner velocity at `x`.
///
/// `x` must be in the eroded free space up to [`DOMAIN_SLACK`].
pub fn field(params: &PlannerParams, world: &World, x: Vec2) -> Result<Vec2> {
    let k0 = nominal_field(params, x);
    let nearest = world.obstacle_distance(x);
    let Some(index) = nearest.index else {
        return Ok(k0);
    };
    let d = nearest.distance;
    if !(d >= world.margin - DOMAIN_SLACK) {
        return Err(NavError::OutOfDomain { distance: d });
    }
    match params.mode {
        FieldMode::Continuous => {
            if d >= world.influence {
                return Ok(k0);
            }
            let b = world.bearing_to(index, x)?;
            let toward = k0.dot(b);
            if toward < 0.0 {
                return Ok(k0);
            }
            let phi = world.bump(d);
            Ok(k0 - b * (phi * toward))
        }
        FieldMode::Discontinuous => {
            if d > world.margin + BOUNDARY_BAND {
                return Ok(k0);
            }
            let b = world.bearing_to(index, x)?;
            let toward = k0.dot(b);
            if toward <= 0.0 {
                return Ok(k0);
            }
            Ok(k0 - b * toward)
        }
    }
}

/// Undesired stationary point behind obstacle `index`.
pub fn stationary_point(params: &PlannerParams, world: &World, index: usize) -> Result<Vec2> {
    world.stationary_point(params.goal, index)
}

/// Attractive/repulsive potential-field baseline.
///
/// The repulsive potential is `k_r/2 (sum 1/rho_i) |x - x*|^2` where
/// `rho_0 = 1 - ((x-cx)/ax)^p - ((y-cy)/ay)^p` keeps the point inside the
/// workspace and `rho_i = |x - c_i|^2 - (r + r_i + eps)^2` outside each
/// margin-inflated obstacle.
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfParams {
    pub k_a: f64,
    pub k_r: f64,
    pub goal: Vec2,
    /// Even exponent `p` of the workspace barrier.
    pub exponent: i32,
    /// Semi-axes `(ax, ay)` of the workspace barrier.
    pub semi_axes: Vec2,
    /// Center of the workspace barrier.
    pub center: Vec2,
}

impl PfParams {
    /// Gains used in the reference comparison, with the workspace barrier
    /// fitted to the eroded workspace.
    pub fn reference(world: &World, goal: Vec2) -> Self {
        let shrink = world.robot_radius + world.margin;
        let (center, semi_axes, exponent) = match world.workspace {
            Workspace::Rectangle {
                center,
                half_extents,
            } => (center, half_extents - Vec2::new(shrink, shrink), 20),
            Workspace::Disc { center, radius } => {
                (center, Vec2::new(radius - shrink, radius - shrink), 2)
            }
        };
        PfParams {
            k_a: 0.05,
            k_r: 0.0001,
            goal,
            exponent,
            semi_axes,
            center,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("pf.k_a", self.k_a)?;
        if !(self.k_r.is_finite() && self.k_r >= 0.0) {
            return Err(NavError::InvalidParameter {
                name: "pf.k_r",
                reason: "must be finite and >= 0",
            });
        }
        if self.exponent < 2 || self.exponent % 2 != 0 {
            return Err(NavError::InvalidParameter {
                name: "pf.exponent",
                reason: "must be an even integer >= 2",
            });
        }
        positive("pf.semi_axes.x", self.semi_axes.x)?;
        positive("pf.semi_axes.y", self.semi_axes.y)
    }
}

/// Negative gradient of the total potential at `x`.
pub fn pf_field(pf: &PfParams, world: &World, x: Vec2) -> Result<Vec2> {
    let e = x - pf.goal;
    let attract = e * pf.k_a;
    if pf.k_r == 0.0 {
        return Ok(-attract);
    }

    let p = pf.exponent;
    let u = (x - pf.center).x / pf.semi_axes.x;
    let v = (x - pf.center).y / pf.semi_axes.y;
    let rho0 = 1.0 - libm::pow(u, p as f64) - libm::pow(v, p as f64);
    if !(rho0 > 0.0) {
        return Err(NavError::SingularPotential {
            term: 0,
            value: rho0,
        });
    }
    let grad_rho0 = Vec2::new(
        -(p as f64) * libm::pow(u, (p - 1) as f64) / pf.semi_axes.x,
        -(p as f64) * libm::pow(v, (p - 1) as f64) / pf.semi_axes.y,
    );
    let mut sum_inv = 1.0 / rho0;
    let mut grad_sum_inv = grad_rho0 * (-1.0 / (rho0 * rho0));
    for (i, o) in world.obstacles.iter().enumerate() {
        let reach = world.robot_radius + o.radius + world.margin;
        let offset = x - o.center;
        let rho = offset.norm_squared() - reach * reach;
        if !(rho > 0.0) {
            return Err(NavError::SingularPotential {
                term: i + 1,
                value: rho,
            });
        }
        sum_inv += 1.0 / rho;
        grad_sum_inv -= offset * (2.0 / (rho * rho));
    }
    let dist_sq = e.norm_squared();
    let repulse = (grad_sum_inv * dist_sq + e * (2.0 * sum_inv)) * (0.5 * pf.k_r);
    Ok(-(attract + repulse))
}

/// Either reference planner, so runs can be driven uniformly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Planner {
    TangentCone(PlannerParams),
    PotentialField(PfParams),
}

impl Planner {
    pub fn velocity(&self, world: &World, x: Vec2) -> Result<Vec2> {
        match self {
            Planner::TangentCone(p) => field(p, world, x),
            Planner::PotentialField(p) => pf_field(p, world, x),
        }
    }

    pub fn goal(&self) -> Vec2 {
        match self {
            Planner::TangentCone(p) => p.goal,
            Planner::PotentialField(p) => p.goal,
        }
    }

    pub fn validate(&self, world: &World) -> Result<()> {
        match self {
            Planner::TangentCone(p) => p.validate(world),
            Planner::PotentialField(p) => p.validate(),
        }
    }
}
