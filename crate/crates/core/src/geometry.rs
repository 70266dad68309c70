//! Workspace, obstacles and the distance queries everything else is built on.
//!
//! The robot is reduced to its virtual control point by inflating every
//! obstacle by the robot radius `r` and eroding the workspace by the same
//! amount. Distances returned here are therefore measured for that point.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::error::{NavError, Result};
use crate::math::Vec2;

/// Clearances closer than this to their bound are reported as marginal.
pub const MARGINAL_SLACK: f64 = 1e-9;

/// A physical disc obstacle.
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obstacle {
    pub center: Vec2,
    pub radius: f64,
}

impl Obstacle {
    pub fn new(center: Vec2, radius: f64) -> Self {
        Obstacle { center, radius }
    }
}

/// Compact convex workspace boundary.
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Workspace {
    Rectangle { center: Vec2, half_extents: Vec2 },
    Disc { center: Vec2, radius: f64 },
}

impl Workspace {
    /// Signed distance from `x` to the complement of the workspace:
    /// positive inside, negative outside, exact for both shapes.
    pub fn depth(&self, x: Vec2) -> f64 {
        match *self {
            Workspace::Rectangle {
                center,
                half_extents,
            } => {
                let dx = half_extents.x - (x.x - center.x).abs();
                let dy = half_extents.y - (x.y - center.y).abs();
                if dx >= 0.0 && dy >= 0.0 {
                    dx.min(dy)
                } else {
                    -Vec2::new((-dx).max(0.0), (-dy).max(0.0)).norm()
                }
            }
            Workspace::Disc { center, radius } => radius - x.distance(center),
        }
    }

    /// Axis-aligned bounding box as `(min, max)`.
    pub fn bounds(&self) -> (Vec2, Vec2) {
        match *self {
            Workspace::Rectangle {
                center,
                half_extents,
            } => (center - half_extents, center + half_extents),
            Workspace::Disc { center, radius } => (
                center - Vec2::new(radius, radius),
                center + Vec2::new(radius, radius),
            ),
        }
    }
}

/// The geometry every other module queries.
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub workspace: Workspace,
    pub obstacles: Vec<Obstacle>,
    /// Radius `r` of the circle enclosing the robot.
    pub robot_radius: f64,
    /// Clearance constant `h`.
    pub clearance: f64,
    /// Safety margin `ε`.
    pub margin: f64,
    /// Influence distance `ε*`.
    pub influence: f64,
}

/// Nearest inflated obstacle. `index` is `None` (and `distance` infinite)
/// when the world has no obstacles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest {
    pub distance: f64,
    pub index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A scalar field is non-positive or non-finite.
    NonPositive { field: &'static str, value: f64 },
    /// `0 < ε < ε* <= h` does not hold.
    MarginOrdering {
        margin: f64,
        influence: f64,
        clearance: f64,
    },
    /// Surface distance between two obstacles is not above `2(r+h)`.
    ObstaclePair {
        first: usize,
        second: usize,
        clearance: f64,
        required: f64,
    },
    /// Distance from an obstacle to the workspace boundary is not above `2r+h`.
    ObstacleBoundary {
        obstacle: usize,
        clearance: f64,
        required: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositive { field, value } => {
                write!(f, "{field} must be > 0 (got {value})")
            }
            Violation::MarginOrdering {
                margin,
                influence,
                clearance,
            } => write!(
                f,
                "need 0 < margin < influence <= clearance (got {margin}, {influence}, {clearance})"
            ),
            Violation::ObstaclePair {
                first,
                second,
                clearance,
                required,
            } => write!(
                f,
                "obstacles {first} and {second} are {clearance:.6} m apart, need > {required:.6} m (pairwise separation)"
            ),
            Violation::ObstacleBoundary {
                obstacle,
                clearance,
                required,
            } => write!(
                f,
                "obstacle {obstacle} is {clearance:.6} m from the workspace boundary, need > {required:.6} m (boundary separation)"
            ),
        }
    }
}

/// A clearance that passes but sits within [`MARGINAL_SLACK`] of its bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal {
    pub what: Violation,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub marginal: Vec<Marginal>,
    /// Smallest pairwise obstacle surface distance, if there are two or more obstacles.
    pub min_pair_clearance: Option<(usize, usize, f64)>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl World {
    /// Check the separation assumptions and parameter ordering.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let scalars = [
            ("robot_radius", self.robot_radius),
            ("clearance", self.clearance),
            ("margin", self.margin),
            ("influence", self.influence),
        ];
        for (field, value) in scalars {
            if !(value.is_finite() && value > 0.0) {
                report
                    .violations
                    .push(Violation::NonPositive { field, value });
            }
        }
        match self.workspace {
            Workspace::Rectangle { half_extents, .. } => {
                for (field, value) in [
                    ("workspace.half_extents.x", half_extents.x),
                    ("workspace.half_extents.y", half_extents.y),
                ] {
                    if !(value.is_finite() && value > 0.0) {
                        report
                            .violations
                            .push(Violation::NonPositive { field, value });
                    }
                }
            }
            Workspace::Disc { radius, .. } => {
                if !(radius.is_finite() && radius > 0.0) {
                    report.violations.push(Violation::NonPositive {
                        field: "workspace.radius",
                        value: radius,
                    });
                }
            }
        }
        if !(0.0 < self.margin && self.margin < self.influence && self.influence <= self.clearance)
        {
            report.violations.push(Violation::MarginOrdering {
                margin: self.margin,
                influence: self.influence,
                clearance: self.clearance,
            });
        }
        for o in &self.obstacles {
            if !(o.radius.is_finite() && o.radius > 0.0) {
                report.violations.push(Violation::NonPositive {
                    field: "obstacle.radius",
                    value: o.radius,
                });
            }
        }

        let r = self.robot_radius;
        let h = self.clearance;
        let pair_required = 2.0 * (r + h);
        for i in 0..self.obstacles.len() {
            for j in (i + 1)..self.obstacles.len() {
                let (a, b) = (self.obstacles[i], self.obstacles[j]);
                let clearance = a.center.distance(b.center) - a.radius - b.radius;
                match report.min_pair_clearance {
                    Some((_, _, m)) if m <= clearance => {}
                    _ => report.min_pair_clearance = Some((i, j, clearance)),
                }
                let v = Violation::ObstaclePair {
                    first: i,
                    second: j,
                    clearance,
                    required: pair_required,
                };
                classify(&mut report, clearance, pair_required, v);
            }
        }
        let boundary_required = 2.0 * r + h;
        for (i, o) in self.obstacles.iter().enumerate() {
            let clearance = self.workspace.depth(o.center) - o.radius;
            let v = Violation::ObstacleBoundary {
                obstacle: i,
                clearance,
                required: boundary_required,
            };
            classify(&mut report, clearance, boundary_required, v);
        }
        report
    }

    /// `β_i(x) = |x - c_i| - (r + r_i)` for one obstacle.
    pub fn inflated_distance(&self, index: usize, x: Vec2) -> f64 {
        let o = &self.obstacles[index];
        x.distance(o.center) - (self.robot_radius + o.radius)
    }

    /// Minimum of `β_i` over all obstacles; ties go to the lowest index.
    pub fn obstacle_distance(&self, x: Vec2) -> Nearest {
        let mut best = Nearest {
            distance: f64::INFINITY,
            index: None,
        };
        for i in 0..self.obstacles.len() {
            let d = self.inflated_distance(i, x);
            if best.index.is_none() || d < best.distance {
                best = Nearest {
                    distance: d,
                    index: Some(i),
                };
            }
        }
        best
    }

    /// Depth of `x` inside the workspace eroded by the robot radius.
    /// `>= 0` on `W`, `>= ε` on `W^ε`, negative outside.
    pub fn workspace_erosion_distance(&self, x: Vec2) -> f64 {
        self.workspace.depth(x) - self.robot_radius
    }

    /// Membership in the free space eroded by `margin` (0 for `X`, ε for `X_ε`).
    pub fn in_free_space(&self, x: Vec2, margin: f64) -> bool {
        self.workspace_erosion_distance(x) >= margin && self.obstacle_distance(x).distance >= margin
    }

    /// Unit vector from `x` toward the center of the nearest obstacle.
    /// Only defined inside an influence region.
    pub fn bearing(&self, x: Vec2) -> Result<Vec2> {
        let nearest = self.obstacle_distance(x);
        let index = match nearest.index {
            Some(i) if nearest.distance <= self.influence => i,
            _ => {
                return Err(NavError::OutsideInfluence {
                    distance: nearest.distance,
                })
            }
        };
        self.bearing_to(index, x)
    }

    pub(crate) fn bearing_to(&self, index: usize, x: Vec2) -> Result<Vec2> {
        (self.obstacles[index].center - x)
            .normalized()
            .ok_or(NavError::SingularBearing { obstacle: index })
    }

    /// C¹ bump blending projection strength from 1 at `d <= ε` to 0 at `d >= ε*`.
    pub fn bump(&self, d: f64) -> f64 {
        bump(self.margin, self.influence, d)
    }

    /// Stationary point behind obstacle `index` for the goal `goal`:
    /// the point on the margin boundary collinear with the center and the
    /// goal, on the far side of the center.
    pub fn stationary_point(&self, goal: Vec2, index: usize) -> Result<Vec2> {
        let o = self
            .obstacles
            .get(index)
            .ok_or(NavError::NoSuchObstacle { index })?;
        let dist = goal.distance(o.center);
        if dist == 0.0 {
            return Err(NavError::DegenerateGoal { obstacle: index });
        }
        let ratio = (self.robot_radius + o.radius + self.margin) / dist;
        Ok(o.center * (1.0 + ratio) - goal * ratio)
    }
}

fn classify(report: &mut ValidationReport, clearance: f64, required: f64, v: Violation) {
    if !(clearance > required) {
        report.violations.push(v);
    } else if clearance - required < MARGINAL_SLACK {
        report.marginal.push(Marginal { what: v });
    }
}

/// Bump profile with margin `eps` and influence `eps_star`.
pub fn bump(eps: f64, eps_star: f64, d: f64) -> f64 {
    if d <= eps {
        1.0
    } else if d >= eps_star {
        0.0
    } else {
        let s = (eps_star - d) / (eps_star - eps);
        (0.5 * (1.0 - libm::cos(PI * s))).clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::table1_world;
    use alloc::vec;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn table1_world_is_valid() {
        let w = table1_world();
        let report = w.validate();
        assert!(report.is_ok(), "{:?}", report.violations);
        assert!(report.marginal.is_empty());
        // brute-force minimum over all 28 pairs: obstacles 5 and 6 (1-based)
        let (i, j, c) = report.min_pair_clearance.unwrap();
        assert_eq!((i, j), (4, 5));
        assert!(close(c, 0.838_486_432_400_471_2, 1e-12));
    }

    #[test]
    fn close_pair_is_reported() {
        let mut w = table1_world();
        w.obstacles = vec![
            Obstacle::new(Vec2::new(0.0, 0.0), 0.1),
            Obstacle::new(Vec2::new(0.5, 0.0), 0.1),
        ];
        let report = w.validate();
        assert_eq!(report.violations.len(), 1);
        match &report.violations[0] {
            Violation::ObstaclePair {
                first,
                second,
                clearance,
                required,
            } => {
                assert_eq!((*first, *second), (0, 1));
                assert!(close(*clearance, 0.3, 1e-12));
                assert!(close(*required, 0.8, 1e-12));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_obstacle_list_is_valid() {
        let mut w = table1_world();
        w.obstacles.clear();
        assert!(w.validate().is_ok());
        let n = w.obstacle_distance(Vec2::ZERO);
        assert_eq!(n.index, None);
        assert!(n.distance.is_infinite() && n.distance > 0.0);
    }

    #[test]
    fn margin_ordering_is_checked() {
        let mut w = table1_world();
        w.influence = 0.25;
        assert!(matches!(
            w.validate().violations[0],
            Violation::MarginOrdering { .. }
        ));
        w.influence = 0.05;
        assert!(!w.validate().is_ok());
    }

    #[test]
    fn marginal_clearance_is_flagged() {
        let mut w = table1_world();
        w.obstacles = vec![
            Obstacle::new(Vec2::new(0.0, 0.0), 0.1),
            Obstacle::new(Vec2::new(1.0 + 5e-10, 0.0), 0.1),
        ];
        let report = w.validate();
        assert!(report.is_ok());
        assert_eq!(report.marginal.len(), 1);
    }

    #[test]
    fn boundary_separation_is_checked() {
        let mut w = table1_world();
        w.obstacles[6].center = Vec2::new(2.0, -1.2);
        let report = w.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::ObstacleBoundary { obstacle: 6, .. })));
    }

    #[test]
    fn obstacle_distance_at_origin() {
        let w = table1_world();
        let n = w.obstacle_distance(Vec2::ZERO);
        assert_eq!(n.index, Some(4));
        // |[0.4, 0.55]| - 0.45
        assert!(close(
            n.distance,
            libm::sqrt(0.4 * 0.4 + 0.55 * 0.55) - 0.45,
            1e-15
        ));
        assert!(close(n.distance, 0.2301, 1e-4));
    }

    #[test]
    fn obstacle_distance_at_center_and_margin() {
        let w = table1_world();
        for (i, o) in w.obstacles.iter().enumerate() {
            let n = w.obstacle_distance(o.center);
            assert_eq!(n.index, Some(i));
            assert!(close(n.distance, -(w.robot_radius + o.radius), 1e-15));
            let x = o.center + Vec2::new(w.robot_radius + o.radius + w.margin, 0.0);
            let n = w.obstacle_distance(x);
            assert_eq!(n.index, Some(i));
            assert!(close(n.distance, w.margin, 1e-12));
        }
    }

    #[test]
    fn erosion_distance() {
        let w = table1_world();
        assert!(close(w.workspace_erosion_distance(Vec2::ZERO), 1.5, 1e-15));
        let on_eroded = Vec2::new(0.0, 1.7 - 0.2 - w.margin);
        assert!(close(
            w.workspace_erosion_distance(on_eroded),
            w.margin,
            1e-15
        ));
        assert!(w.workspace_erosion_distance(Vec2::new(3.5, 0.0)) < 0.0);
        assert!(w.workspace_erosion_distance(Vec2::new(3.5, 2.0)) < 0.0);
        // outside a corner: distance to the corner point
        let d = w.workspace.depth(Vec2::new(3.5, 2.1));
        assert!(close(d, -0.5, 1e-15));
    }

    #[test]
    fn disc_workspace_depth() {
        let ws = Workspace::Disc {
            center: Vec2::new(1.0, 1.0),
            radius: 2.0,
        };
        assert!(close(ws.depth(Vec2::new(1.0, 1.0)), 2.0, 1e-15));
        assert!(close(ws.depth(Vec2::new(4.0, 1.0)), -1.0, 1e-15));
    }

    #[test]
    fn free_space_membership() {
        let w = table1_world();
        assert!(w.in_free_space(Vec2::new(2.5, 1.0), w.margin));
        assert!(!w.in_free_space(w.obstacles[0].center, 0.0));
        assert!(!w.in_free_space(w.obstacles[0].center, w.margin));
        assert!(!w.in_free_space(Vec2::new(3.2, 0.0), 0.0));
    }

    #[test]
    fn bearing_cases() {
        let w = table1_world();
        let o = w.obstacles[2];
        let x = o.center + Vec2::new(w.robot_radius + o.radius + w.margin, 0.0);
        let b = w.bearing(x).unwrap();
        assert!(close(b.x, -1.0, 1e-15) && close(b.y, 0.0, 1e-15));

        let b = w.bearing(Vec2::new(0.4, 0.05)).unwrap();
        assert!(close(b.x, 0.0, 1e-15) && close(b.y, 1.0, 1e-15));

        assert!(matches!(
            w.bearing(Vec2::ZERO),
            Err(NavError::OutsideInfluence { .. })
        ));
        assert_eq!(
            w.bearing(o.center),
            Err(NavError::SingularBearing { obstacle: 2 })
        );
    }

    #[test]
    fn bump_values() {
        let eps = 0.1;
        let eps_star = 0.2;
        assert_eq!(bump(eps, eps_star, 0.1), 1.0);
        assert_eq!(bump(eps, eps_star, 0.2), 0.0);
        assert_eq!(bump(eps, eps_star, 0.0), 1.0);
        assert_eq!(bump(eps, eps_star, 0.5), 0.0);
        assert!(close(bump(eps, eps_star, 0.15), 0.5, 1e-15));
    }

    #[test]
    fn bump_flat_at_both_ends() {
        let (eps, eps_star) = (0.1, 0.2);
        let mut prev = f64::INFINITY;
        for step in [1e-3, 1e-4, 1e-5] {
            for at in [eps, eps_star] {
                let fd = (bump(eps, eps_star, at + step) - bump(eps, eps_star, at - step))
                    / (2.0 * step);
                // |fd| = O(step) since the one-sided second derivative is finite
                assert!(fd.abs() < 300.0 * step, "fd {fd} at {at} step {step}");
            }
            let fd = (bump(eps, eps_star, eps + step) - 1.0) / step;
            assert!(fd.abs() < prev);
            prev = fd.abs();
        }
    }

    #[test]
    fn stationary_point_examples() {
        let mut w = table1_world();
        let goal = Vec2::new(2.5, 1.0);
        let s = w.stationary_point(goal, 0).unwrap();
        assert!(close(s.x, -2.378_193_826_730_685, 1e-12));
        assert!(close(s.y, -0.680_266_762_540_569_2, 1e-12));

        w.obstacles = vec![Obstacle::new(Vec2::ZERO, 0.2)];
        w.robot_radius = 0.2;
        w.margin = 0.1;
        let s = w.stationary_point(Vec2::new(1.0, 0.0), 0).unwrap();
        assert!(close(s.x, -0.5, 1e-15) && close(s.y, 0.0, 1e-15));
        assert_eq!(
            w.stationary_point(Vec2::ZERO, 0),
            Err(NavError::DegenerateGoal { obstacle: 0 })
        );
        assert_eq!(
            w.stationary_point(goal, 3),
            Err(NavError::NoSuchObstacle { index: 3 })
        );
    }
}
