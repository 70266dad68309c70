//! Differential-drive kinematics and the off-center virtual control point.
//!
//! The pose `(x̄, ȳ, θ)` evolves as `[cos θ 0; sin θ 0; 0 1] (u + u_d)` with
//! `u = [v, ω]`. The point at signed offset `ℓ` along the heading moves as
//! `R(θ)(u + u_d)`, which is full rank for `ℓ != 0`.

use crate::error::{positive, NavError, Result};
use crate::math::{Mat2, Vec2};

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotParams {
    /// Signed offset `ℓ` of the virtual control point (m).
    pub offset: f64,
    /// Radius of the circle enclosing the robot (m).
    pub radius: f64,
    /// Input norm limit `u_m`.
    pub input_limit: f64,
}

impl RobotParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.offset.is_finite() && self.offset != 0.0 && self.offset.abs() <= 1.0) {
            return Err(NavError::InvalidParameter {
                name: "robot.offset",
                reason: "must be non-zero with |offset| <= 1",
            });
        }
        positive("robot.radius", self.radius)?;
        positive("robot.input_limit", self.input_limit)
    }
}

/// Wheel-axis pose. The heading is kept unwrapped.
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub const fn new(x: f64, y: f64, theta: f64) -> Self {
        Pose { x, y, theta }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// Heading wrapped into `[-π, π)`.
    pub fn wrapped_heading(&self) -> f64 {
        use core::f64::consts::{PI, TAU};
        let a = libm::fmod(self.theta + PI, TAU);
        if a < 0.0 {
            a + TAU - PI
        } else {
            a - PI
        }
    }

    /// The pose whose virtual point (offset `offset`) sits at `point`.
    pub fn with_virtual_point(point: Vec2, theta: f64, offset: f64) -> Pose {
        let p = point - Vec2::from_angle(theta) * offset;
        Pose::new(p.x, p.y, theta)
    }

    pub(crate) fn advance(&self, rate: &Pose, h: f64) -> Pose {
        Pose::new(
            self.x + h * rate.x,
            self.y + h * rate.y,
            self.theta + h * rate.theta,
        )
    }
}

/// `R(θ) = [[cos θ, -ℓ sin θ], [sin θ, ℓ cos θ]]`.
pub fn rotation_matrix(offset: f64, theta: f64) -> Mat2 {
    let (s, c) = (libm::sin(theta), libm::cos(theta));
    Mat2::new(c, -offset * s, s, offset * c)
}

/// Closed-form `R(θ)^-1 = [[cos θ, sin θ], [-sin θ / ℓ, cos θ / ℓ]]`.
pub fn rotation_matrix_inverse(offset: f64, theta: f64) -> Mat2 {
    let (s, c) = (libm::sin(theta), libm::cos(theta));
    Mat2::new(c, s, -s / offset, c / offset)
}

/// Position of the virtual control point.
pub fn virtual_point(params: &RobotParams, pose: &Pose) -> Vec2 {
    pose.position() + Vec2::from_angle(pose.theta) * params.offset
}

/// Pose rate under input `u` and disturbance `u_d` (both `[v, ω]`).
pub fn pose_derivative(pose: &Pose, u: Vec2, u_d: Vec2) -> Pose {
    let v = u.x + u_d.x;
    let w = u.y + u_d.y;
    Pose::new(v * libm::cos(pose.theta), v * libm::sin(pose.theta), w)
}

/// One component `amplitude * sin(frequency * t + phase) + offset`.
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sinusoid {
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
    pub offset: f64,
}

impl Sinusoid {
    pub fn eval(&self, t: f64) -> f64 {
        self.amplitude * libm::sin(self.frequency * t + self.phase) + self.offset
    }

    fn peak(&self) -> f64 {
        self.amplitude.abs() + self.offset.abs()
    }
}

/// Matched input disturbance `u_d(t)`.
#[derive(Debug, Clone, Copy)]
pub enum DisturbanceModel {
    None,
    /// `gain * [linear(t), angular(t)]`.
    Sinusoidal {
        gain: f64,
        linear: Sinusoid,
        angular: Sinusoid,
    },
    /// Arbitrary signal with a caller-declared bound.
    Custom {
        signal: fn(f64) -> Vec2,
        bound: f64,
    },
}

impl DisturbanceModel {
    /// `0.01 [sin(0.2 t) + 1, cos(0.3 t) - 2]`.
    pub fn reference() -> Self {
        DisturbanceModel::Sinusoidal {
            gain: 0.01,
            linear: Sinusoid {
                amplitude: 1.0,
                frequency: 0.2,
                phase: 0.0,
                offset: 1.0,
            },
            angular: Sinusoid {
                amplitude: 1.0,
                frequency: 0.3,
                phase: core::f64::consts::FRAC_PI_2,
                offset: -2.0,
            },
        }
    }

    pub fn eval(&self, t: f64) -> Vec2 {
        match self {
            DisturbanceModel::None => Vec2::ZERO,
            DisturbanceModel::Sinusoidal {
                gain,
                linear,
                angular,
            } => Vec2::new(linear.eval(t), angular.eval(t)) * *gain,
            DisturbanceModel::Custom { signal, .. } => signal(t),
        }
    }

    /// Declared `sup_t |u_d(t)|`. For the sinusoidal kind this is the
    /// component-wise peak, approached (not attained) when the frequencies
    /// are incommensurate and strictly above the true sup otherwise.
    pub fn bound(&self) -> f64 {
        match self {
            DisturbanceModel::None => 0.0,
            DisturbanceModel::Sinusoidal {
                gain,
                linear,
                angular,
            } => gain.abs() * libm::hypot(linear.peak(), angular.peak()),
            DisturbanceModel::Custom { bound, .. } => *bound,
        }
    }
}

impl PartialEq for DisturbanceModel {
    fn eq(&self, other: &Self) -> bool {
        use DisturbanceModel::*;
        match (self, other) {
            (None, None) => true,
            (
                Sinusoidal {
                    gain: g1,
                    linear: l1,
                    angular: a1,
                },
                Sinusoidal {
                    gain: g2,
                    linear: l2,
                    angular: a2,
                },
            ) => g1 == g2 && l1 == l2 && a1 == a2,
            (
                Custom {
                    signal: s1,
                    bound: b1,
                },
                Custom {
                    signal: s2,
                    bound: b2,
                },
            ) => core::ptr::fn_addr_eq(*s1, *s2) && b1 == b2,
            _ => false,
        }
    }
}

/// Free function form of [`DisturbanceModel::eval`].
pub fn disturbance(model: &DisturbanceModel, t: f64) -> Vec2 {
    model.eval(t)
}
