use core::fmt;

/// Errors raised by the geometry, planner, controller and simulator.
#[derive(Debug, Clone, PartialEq)]
pub enum NavError {
    /// A parameter failed its invariant; `name` is the parameter, `reason` the rule.
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// A bearing was requested outside every influence region.
    OutsideInfluence { distance: f64 },
    /// A bearing was requested at an obstacle center.
    SingularBearing { obstacle: usize },
    /// A direction vector that must be unit length is not.
    NotUnitVector { norm: f64 },
    /// The field was evaluated inside an obstacle margin.
    OutOfDomain { distance: f64 },
    /// The goal coincides with an obstacle center.
    DegenerateGoal { obstacle: usize },
    /// The potential-field baseline was evaluated where a barrier term is non-positive.
    SingularPotential { term: usize, value: f64 },
    /// The tracking error left the tube (`xi >= 1`).
    TubeViolation { xi: f64 },
    /// A start point does not lie in the eroded free space.
    StartOutsideFreeSpace { x: f64, y: f64 },
    /// An obstacle index does not exist.
    NoSuchObstacle { index: usize },
}

impl fmt::Display for NavError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NavError::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            NavError::OutsideInfluence { distance } => write!(
                f,
                "bearing undefined: obstacle distance {distance} exceeds the influence radius"
            ),
            NavError::SingularBearing { obstacle } => {
                write!(f, "bearing undefined at the center of obstacle {obstacle}")
            }
            NavError::NotUnitVector { norm } => {
                write!(f, "expected a unit vector, got norm {norm}")
            }
            NavError::OutOfDomain { distance } => write!(
                f,
                "field evaluated inside an obstacle margin (obstacle distance {distance})"
            ),
            NavError::DegenerateGoal { obstacle } => {
                write!(f, "goal coincides with the center of obstacle {obstacle}")
            }
            NavError::SingularPotential { term, value } => {
                write!(f, "potential barrier term {term} is non-positive ({value})")
            }
            NavError::TubeViolation { xi } => {
                write!(f, "tracking error left the tube (xi = {xi})")
            }
            NavError::StartOutsideFreeSpace { x, y } => {
                write!(f, "start [{x}, {y}] is not in the eroded free space")
            }
            NavError::NoSuchObstacle { index } => write!(f, "no obstacle with index {index}"),
        }
    }
}

impl core::error::Error for NavError {}

pub type Result<T> = core::result::Result<T, NavError>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(NavError::InvalidParameter {
            name,
            reason: "must be finite and > 0",
        })
    }
}
