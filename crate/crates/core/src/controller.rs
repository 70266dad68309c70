//! Adaptive tube-following controller.
//!
//! The tracking error `x_e = x - x_d` is kept inside a ball of radius `ρ`
//! through the logarithmic barrier `L = ½ ln(1/(1-ξ))`, `ξ = |x_e|²/ρ²`.
//! An unknown disturbance bound is estimated online and fed to a smooth
//! robust term; the estimate is confined to `[0, d_m + δ]` by projection.

use crate::error::{positive, NavError, Result};
use crate::geometry::World;
use crate::kinematics::rotation_matrix_inverse;
use crate::math::Vec2;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerParams {
    /// Tube radius `ρ` (m).
    pub tube_radius: f64,
    /// Feedback gain `k` (1/s).
    pub gain: f64,
    /// Smoothing constant `φ` of the robust term.
    pub smoothing: f64,
    /// Adaptation rate `η`.
    pub adaptation_rate: f64,
    /// Leakage `γ`.
    pub leakage: f64,
    /// Known bound `d_m` on the disturbance bound.
    pub bound: f64,
    /// Projection band `δ`.
    pub band: f64,
    /// Initial estimate `d̂(0)`.
    pub initial_estimate: f64,
}

impl ControllerParams {
    pub fn validate(&self, world: &World) -> Result<()> {
        positive("controller.tube_radius", self.tube_radius)?;
        positive("controller.gain", self.gain)?;
        positive("controller.smoothing", self.smoothing)?;
        positive("controller.adaptation_rate", self.adaptation_rate)?;
        positive("controller.leakage", self.leakage)?;
        positive("controller.bound", self.bound)?;
        positive("controller.band", self.band)?;
        if !(0.0 <= self.initial_estimate && self.initial_estimate <= self.ceiling()) {
            return Err(NavError::InvalidParameter {
                name: "controller.initial_estimate",
                reason: "must lie in [0, bound + band]",
            });
        }
        if !(self.tube_radius <= world.margin) {
            return Err(NavError::InvalidParameter {
                name: "controller.tube_radius",
                reason: "tube must fit inside the safety margin (tube_radius <= margin)",
            });
        }
        Ok(())
    }

    /// Upper edge `d_m + δ` of the projection domain.
    pub fn ceiling(&self) -> f64 {
        self.bound + self.band
    }

    /// `(kρ + α + d_m + δ) / |ℓ|`, the a-priori bound on `|u|` when the
    /// reference speed is at most `alpha`.
    pub fn input_bound(&self, alpha: f64, offset: f64) -> f64 {
        (self.gain * self.tube_radius + alpha + self.bound + self.band) / offset.abs()
    }
}

/// Disturbance-bound estimate `d̂`.
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveState {
    pub estimate: f64,
}

impl AdaptiveState {
    pub fn new(params: &ControllerParams) -> Self {
        AdaptiveState {
            estimate: params.initial_estimate,
        }
    }
}

/// `ξ = |x_e|² / ρ²`.
pub fn transformed_error(params: &ControllerParams, x_e: Vec2) -> f64 {
    x_e.norm_squared() / (params.tube_radius * params.tube_radius)
}

fn inside_tube(params: &ControllerParams, x_e: Vec2) -> Result<f64> {
    let xi = transformed_error(params, x_e);
    if xi < 1.0 {
        Ok(xi)
    } else {
        Err(NavError::TubeViolation { xi })
    }
}

/// `z = x_e / (ρ² (1 - ξ))`.
pub fn z_vector(params: &ControllerParams, x_e: Vec2) -> Result<Vec2> {
    let xi = inside_tube(params, x_e)?;
    Ok(x_e / (params.tube_radius * params.tube_radius * (1.0 - xi)))
}

/// `ϖ = d̂² z / sqrt(d̂² |z|² + φ²)`; `|ϖ| <= d̂`.
pub fn robust_term(params: &ControllerParams, state: &AdaptiveState, z: Vec2) -> Vec2 {
    let d = state.estimate;
    let denom = libm::hypot(d * z.norm(), params.smoothing);
    z * (d * d / denom)
}

/// `u = R(θ)^-1 (-k x_e + τ_d - ϖ)`.
pub fn control_law(
    params: &ControllerParams,
    state: &AdaptiveState,
    offset: f64,
    theta: f64,
    x_e: Vec2,
    tau_d: Vec2,
) -> Result<Vec2> {
    let z = z_vector(params, x_e)?;
    let w = robust_term(params, state, z);
    let virtual_input = tau_d - x_e * params.gain - w;
    Ok(rotation_matrix_inverse(offset, theta) * virtual_input)
}

/// Which branch of the projection operator is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionCase {
    /// `d̂ < d_m`.
    Interior,
    /// `d̂ >= d_m` and `Φ <= 0`.
    Decreasing,
    /// `d̂ >= d_m` and `Φ > 0`: rate scaled by `1 - (d̂ - d_m)/δ`.
    Scaled,
}

/// Rate `d̂̇ = Proj(d̂, Φ)` with `Φ = |z| - γ d̂`.
pub fn projection_rate(
    params: &ControllerParams,
    estimate: f64,
    z_norm: f64,
) -> (f64, ProjectionCase) {
    let phi = z_norm - params.leakage * estimate;
    if estimate < params.bound {
        (params.adaptation_rate * phi, ProjectionCase::Interior)
    } else if phi <= 0.0 {
        (params.adaptation_rate * phi, ProjectionCase::Decreasing)
    } else {
        // Written from the upper edge so the rate is exactly zero there.
        let scale = (params.ceiling() - estimate) / params.band;
        (params.adaptation_rate * scale * phi, ProjectionCase::Scaled)
    }
}

/// One explicit Euler step of the adaptive law, clamped to `[0, d_m + δ]`.
pub fn adaptive_update(
    params: &ControllerParams,
    state: &AdaptiveState,
    z: Vec2,
    dt: f64,
) -> AdaptiveState {
    let (rate, _) = projection_rate(params, state.estimate, z.norm());
    AdaptiveState {
        estimate: (state.estimate + dt * rate).clamp(0.0, params.ceiling()),
    }
}

/// `L = ½ ln(1 / (1 - ξ))`.
pub fn barrier_value(params: &ControllerParams, x_e: Vec2) -> Result<f64> {
    let xi = inside_tube(params, x_e)?;
    Ok(-0.5 * libm::log1p(-xi))
}
