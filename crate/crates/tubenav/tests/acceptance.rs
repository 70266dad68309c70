//! Acceptance checks against the bundled reference configuration. Prints one
//! PASS/FAIL line per criterion and exits non-zero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use tubenav::config::{load_config, ScenarioConfig};
use tubenav::io::write_trajectory;
use tubenav::report;
use tubenav_core::controller::{adaptive_update, projection_rate, robust_term};
use tubenav_core::kinematics::{rotation_matrix, virtual_point};
use tubenav_core::planner::{field, pf_field, projection_matrix};
use tubenav_core::sim::compute_metrics;
use tubenav_core::{
    AdaptiveState, PfParams, PlannerChoice, Pose, RunKind, Scenario, Trajectory, Vec2, Violation,
    Workspace, World,
};

const STARTS: usize = 20;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn config_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/table1.cfg")
}

fn load() -> (ScenarioConfig, Scenario) {
    let path = config_path();
    let config = load_config(&path).expect("table1.cfg parses");
    let scenario = config
        .to_scenario(path.parent())
        .expect("table1.cfg is runnable");
    (config, scenario)
}

fn world_of(config: &ScenarioConfig) -> World {
    config.world(config_path().parent()).expect("world builds")
}

fn criterion_1(config: &ScenarioConfig) -> Outcome {
    let base = world_of(config).validate();
    if !base.is_ok() {
        return outcome(
            false,
            format!("reference world rejected: {:?}", base.violations),
        );
    }
    let n = config.obstacles.len();
    let (r, h) = (config.robot.radius, config.world.clearance.unwrap());
    let mut mutations = 0;
    let mut missed = Vec::new();

    // Pair separation: move obstacle i so its surface gap to j drops below 2(r+h).
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for gap in [2.0 * (r + h) - 0.01, 0.5, -0.05] {
                let mut c = config.clone();
                let (a, b) = (c.obstacles[i], c.obstacles[j]);
                let ca = Vec2::from(a.center);
                let cb = Vec2::from(b.center);
                let u = (ca - cb).normalized().unwrap();
                c.obstacles[i].center = (cb + u * (a.radius + b.radius + gap)).into();
                mutations += 1;
                let found = world_of(&c).validate().violations.iter().any(|v| {
                    matches!(*v, Violation::ObstaclePair { first, second, .. }
                        if (first, second) == (i.min(j), i.max(j)))
                });
                if !found {
                    missed.push(format!("pair {i}-{j} gap {gap}"));
                }
            }
        }
    }

    // Boundary separation: push obstacle i toward each wall in turn.
    let world = world_of(config);
    let Workspace::Rectangle {
        center,
        half_extents,
    } = world.workspace
    else {
        return outcome(false, "reference workspace is not a rectangle");
    };
    for i in 0..n {
        for wall in 0..4 {
            for gap in [2.0 * r + h - 0.01, 0.3, 0.0] {
                let mut c = config.clone();
                let o = c.obstacles[i];
                let mut p = Vec2::from(o.center);
                let reach = o.radius + gap;
                match wall {
                    0 => p.x = center.x + half_extents.x - reach,
                    1 => p.x = center.x - half_extents.x + reach,
                    2 => p.y = center.y + half_extents.y - reach,
                    _ => p.y = center.y - half_extents.y + reach,
                }
                c.obstacles[i].center = p.into();
                mutations += 1;
                let found = world_of(&c).validate().violations.iter().any(
                    |v| matches!(*v, Violation::ObstacleBoundary { obstacle, .. } if obstacle == i),
                );
                if !found {
                    missed.push(format!("obstacle {i} wall {wall} gap {gap}"));
                }
            }
        }
    }
    outcome(
        missed.is_empty(),
        format!(
            "reference world valid; {} of {mutations} single-obstacle mutations detected{}",
            mutations - missed.len(),
            if missed.is_empty() {
                String::new()
            } else {
                format!(", missed {missed:?}")
            }
        ),
    )
}

struct Sweep {
    starts: Vec<Vec2>,
    tc: Vec<Trajectory>,
}

fn tc_sweep(s: &Scenario) -> Sweep {
    let starts = report::starts(s, STARTS, s.sim.seed);
    let tc = starts
        .par_iter()
        .map(|&x| {
            s.run_from(RunKind::Reference(PlannerChoice::Tc), x)
                .expect("start in free space")
        })
        .collect();
    Sweep { starts, tc }
}

fn criterion_2(s: &Scenario, sweep: &Sweep) -> Outcome {
    let alpha = s.planner.alpha;
    let max = sweep
        .tc
        .iter()
        .flat_map(|t| t.samples.iter().map(|r| r.u.norm()))
        .fold(0.0, f64::max);
    outcome(
        max <= alpha + 1e-12,
        format!(
            "max |tau_d| = {max:.15} over {} reference runs (alpha = {alpha})",
            sweep.tc.len()
        ),
    )
}

fn criterion_3(s: &Scenario, sweep: &Sweep) -> Outcome {
    let w = &s.world;
    let tol = 1e-6;
    let mut min_obstacle = f64::INFINITY;
    let mut min_erosion = f64::INFINITY;
    let mut reached = 0;
    for t in &sweep.tc {
        for r in &t.samples {
            min_obstacle = min_obstacle.min(w.obstacle_distance(r.reference).distance);
            min_erosion = min_erosion.min(w.workspace_erosion_distance(r.reference));
        }
        let last = t.samples.last().unwrap();
        if last.reference.distance(s.planner.goal) <= 0.01 && last.t <= 500.0 {
            reached += 1;
        }
    }
    let eps = w.margin;
    outcome(
        min_obstacle >= eps - tol && min_erosion >= eps - tol && reached == sweep.tc.len(),
        format!(
            "min d_O = {min_obstacle:.9}, min erosion depth = {min_erosion:.9} (margin {eps}); {reached}/{} reached the goal",
            sweep.tc.len()
        ),
    )
}

fn criterion_4(s: &Scenario) -> Outcome {
    let w = &s.world;
    let goal = s.planner.goal;
    let results: Vec<(usize, f64, bool, f64)> = (0..w.obstacles.len())
        .into_par_iter()
        .map(|i| {
            let stationary = w.stationary_point(goal, i).unwrap();
            let dir = (w.obstacles[i].center - goal).normalized().unwrap();
            let start = stationary + dir * 0.05;
            assert!(
                w.in_free_space(start, w.margin),
                "manifold start {i} not free"
            );

            let mut on = s.clone();
            on.sim.duration = 300.0;
            let t = on
                .run_from(RunKind::Reference(PlannerChoice::Tc), start)
                .unwrap();
            let dist = t.samples.last().unwrap().reference.distance(stationary);

            let mut off = s.clone();
            off.sim.duration = 500.0;
            let t = off
                .run_from(
                    RunKind::Reference(PlannerChoice::Tc),
                    start + dir.perp() * 1e-3,
                )
                .unwrap();
            let m = compute_metrics(&t);
            (i, dist, m.reached_goal, m.final_time)
        })
        .collect();
    let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let escaped = results.iter().filter(|r| r.2).count();
    let slowest = results.iter().map(|r| r.3).fold(0.0, f64::max);
    outcome(
        worst <= 1e-3 && escaped == results.len(),
        format!(
            "on-ray starts end within {worst:.2e} m of their stationary points after 300 s; \
             {escaped}/{} offset starts reach the goal (latest at {slowest:.1} s)",
            results.len()
        ),
    )
}

fn criterion_5(s: &Scenario, closed: &Trajectory) -> Outcome {
    let m = compute_metrics(closed);
    let bound = s.controller.input_bound(s.planner.alpha, s.robot.offset);
    let ceiling = s.controller.ceiling();
    let (lo, hi) = closed
        .samples
        .iter()
        .map(|r| r.estimate)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    let pass = m.max_error < s.controller.tube_radius
        && lo >= 0.0
        && hi <= ceiling
        && m.max_input <= 1.42
        && (bound - 1.42).abs() < 1e-12
        && bound <= s.robot.input_limit
        && m.reached_goal
        && !m.tube_violated;
    outcome(
        pass,
        format!(
            "max |x_e| = {:.3e} < {}, estimate in [{lo:.4}, {hi:.4}] within [0, {ceiling}], \
             max |u| = {:.4} <= bound {bound:.2} <= limit {}",
            m.max_error, s.controller.tube_radius, m.max_input, s.robot.input_limit
        ),
    )
}

fn criterion_6(s: &Scenario, closed: &Trajectory) -> Outcome {
    let pf = compute_metrics(&s.run(RunKind::PfClosedLoop).unwrap());
    let tc = compute_metrics(closed);
    let rho = s.controller.tube_radius;
    outcome(
        pf.max_error > rho && tc.max_error < rho,
        format!(
            "potential-field deviation {:.4} m vs tube radius {rho}; tangent-cone tracking error {:.3e} m",
            pf.max_error, tc.max_error
        ),
    )
}

fn criterion_7(s: &Scenario, sweep: &Sweep) -> Outcome {
    let rep = report::compare(
        s,
        &[PlannerChoice::Tc, PlannerChoice::Pf],
        &sweep.starts,
        s.sim.seed,
    );
    let tc = &rep.summary[0];
    let pf = &rep.summary[1];
    match (tc.mean_path_length_common, pf.mean_path_length_common) {
        (Some(a), Some(b)) => outcome(
            a <= b && rep.common_successes == STARTS,
            format!(
                "mean path length {a:.4} m (tangent cone) vs {b:.4} m (potential field) over {} common successes",
                rep.common_successes
            ),
        ),
        _ => outcome(false, "no common successes"),
    }
}

fn criterion_8(s: &Scenario, sweep: &Sweep) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut failures: Vec<String> = Vec::new();
    let mut check = |name: &str, ok: bool| {
        if !ok && !failures.iter().any(|f| f == name) {
            failures.push(name.to_string());
        }
    };
    let p = s.controller;
    let w = &s.world;
    let planner = s.planner;

    for _ in 0..10_000 {
        let b: f64 = 10f64.powf(rng.random_range(-6.0..3.0));
        let q = b * rng.random_range(0.0..1.0) * (1.0 - 1e-12);
        let mid = -(-q / b).ln_1p();
        let slack = 4.0 * f64::EPSILON * mid.abs();
        check(
            "log-barrier inequality",
            q / b <= mid + slack && mid <= q / (b - q) + slack,
        );
    }

    for _ in 0..10_000 {
        let d = rng.random_range(0.0..=p.ceiling());
        let z = Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            * 10f64.powi(rng.random_range(-8..8));
        check(
            "robust term bounded by estimate",
            robust_term(&p, &AdaptiveState { estimate: d }, z).norm() <= d * (1.0 + 1e-15),
        );
    }

    for _ in 0..500 {
        let mut st = AdaptiveState {
            estimate: rng.random_range(0.0..=p.ceiling()),
        };
        for _ in 0..200 {
            let mag = if rng.random_bool(0.5) {
                0.0
            } else {
                rng.random_range(0.0..1e9)
            };
            let z = Vec2::new(mag, -mag);
            // Continuous-time rate points inward at both edges.
            check(
                "projection rate inward at edges",
                projection_rate(&p, 0.0, z.norm()).0 >= 0.0
                    && projection_rate(&p, p.ceiling(), z.norm()).0 <= 0.0,
            );
            st = adaptive_update(&p, &st, z, rng.random_range(1e-4..10.0));
            check(
                "estimate stays in domain",
                (0.0..=p.ceiling()).contains(&st.estimate),
            );
        }
    }

    for _ in 0..10_000 {
        let phi = rng.random_range(0.0..=1.0);
        let m = projection_matrix(phi, Vec2::from_angle(rng.random_range(-4.0..4.0))).unwrap();
        let (lo, hi) = m.symmetric_eigenvalues();
        check(
            "projection spectrum",
            (lo - (1.0 - phi)).abs() < 1e-12 && (hi - 1.0).abs() < 1e-12,
        );
    }

    // Straddle pairs 1e-8 apart across the influence boundary and across
    // the surface where the nominal field turns tangent to the bearing.
    let mut worst: f64 = 0.0;
    for o in &w.obstacles {
        let inflated = w.robot_radius + o.radius;
        for k in 0..720 {
            let u = Vec2::from_angle(k as f64 * std::f64::consts::TAU / 720.0);
            let a = o.center + u * (inflated + w.influence - 5e-9);
            let b = o.center + u * (inflated + w.influence + 5e-9);
            if w.in_free_space(a, w.margin) && w.in_free_space(b, w.margin) {
                worst = worst
                    .max((field(&planner, w, a).unwrap() - field(&planner, w, b).unwrap()).norm());
            }
        }
        let to_goal = planner.goal - o.center;
        let (dist, dir) = (to_goal.norm(), to_goal.normalized().unwrap());
        for k in 1..200 {
            let radius = inflated + w.margin + (w.influence - w.margin) * k as f64 / 200.0;
            let (c, sn) = (radius / dist, (1.0 - (radius / dist).powi(2)).sqrt());
            for sign in [-1.0, 1.0] {
                let u = dir * c + dir.perp() * (sign * sn);
                let x = o.center + u * radius;
                let (a, b) = (x + u.perp() * 5e-9, x - u.perp() * 5e-9);
                if w.in_free_space(a, w.margin) && w.in_free_space(b, w.margin) {
                    worst = worst.max(
                        (field(&planner, w, a).unwrap() - field(&planner, w, b).unwrap()).norm(),
                    );
                }
            }
        }
    }
    check("field continuity across switching surfaces", worst < 1e-6);

    for _ in 0..2_000 {
        let theta = rng.random_range(-10.0..10.0);
        let ell = if rng.random_bool(0.5) {
            rng.random_range(-1.0..-1e-2)
        } else {
            rng.random_range(1e-2..1.0)
        };
        let robot = tubenav_core::RobotParams {
            offset: ell,
            ..s.robot
        };
        let (x, y) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let v = rng.random_range(-2.0..2.0);
        let om = rng.random_range(-2.0..2.0);
        let exact = |h: f64| {
            let half = 0.5 * om * h;
            let sinc = if half == 0.0 { 1.0 } else { half.sin() / half };
            let chord = v * h * sinc;
            let mid = theta + half;
            virtual_point(
                &robot,
                &Pose::new(x + chord * mid.cos(), y + chord * mid.sin(), theta + om * h),
            )
        };
        let h = 1e-5;
        let fd = (exact(h) - exact(-h)) / (2.0 * h);
        check(
            "virtual-point rate consistency",
            (fd - rotation_matrix(ell, theta) * Vec2::new(v, om)).norm() < 1e-8,
        );
    }

    let pf = PfParams::reference(w, planner.goal);
    let mut checked = 0;
    while checked < 1_000 {
        let x = Vec2::new(rng.random_range(-3.2..3.2), rng.random_range(-1.7..1.7));
        if !w.in_free_space(x, w.margin) || x.distance(pf.goal) <= 0.05 {
            continue;
        }
        let Ok(g) = pf_field(&pf, w, x) else { continue };
        if singularity_distance(&pf, w, x) <= 1e-4 {
            continue;
        }
        let h = 1e-6;
        let d = |e: Vec2| {
            (-pf_potential(&pf, w, x + e * 2.0) + 8.0 * pf_potential(&pf, w, x + e)
                - 8.0 * pf_potential(&pf, w, x - e)
                + pf_potential(&pf, w, x - e * 2.0))
                / (12.0 * h)
        };
        let fd = -Vec2::new(d(Vec2::new(h, 0.0)), d(Vec2::new(0.0, h)));
        check(
            "potential-field gradient",
            (g - fd).norm() / g.norm() < 1e-5,
        );
        checked += 1;
    }

    for t in &sweep.tc {
        for pair in t.samples.windows(2) {
            let w0 = 0.5 * pair[0].reference.distance(planner.goal).powi(2);
            let w1 = 0.5 * pair[1].reference.distance(planner.goal).powi(2);
            check("distance to goal non-increasing", w1 <= w0 + 1e-9);
        }
    }

    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("all property checks hold (max straddle jump {worst:.2e})")
        } else {
            format!("failed: {}", failures.join(", "))
        },
    )
}

fn pf_potential(pf: &PfParams, w: &World, x: Vec2) -> f64 {
    let d2 = (x - pf.goal).norm_squared();
    let rho0 = 1.0
        - ((x.x - pf.center.x) / pf.semi_axes.x).powi(pf.exponent)
        - ((x.y - pf.center.y) / pf.semi_axes.y).powi(pf.exponent);
    let mut s = 1.0 / rho0;
    for o in &w.obstacles {
        let reach = w.robot_radius + o.radius + w.margin;
        s += 1.0 / ((x - o.center).norm_squared() - reach * reach);
    }
    0.5 * pf.k_a * d2 + 0.5 * pf.k_r * s * d2
}

fn singularity_distance(pf: &PfParams, w: &World, x: Vec2) -> f64 {
    let p = pf.exponent;
    let u = (x.x - pf.center.x) / pf.semi_axes.x;
    let v = (x.y - pf.center.y) / pf.semi_axes.y;
    let rho0 = 1.0 - u.powi(p) - v.powi(p);
    let grad = Vec2::new(
        p as f64 * u.powi(p - 1) / pf.semi_axes.x,
        p as f64 * v.powi(p - 1) / pf.semi_axes.y,
    );
    (0..w.obstacles.len())
        .map(|i| w.inflated_distance(i, x) - w.margin)
        .fold(rho0 / grad.norm(), f64::min)
}

fn csv_bytes(t: &Trajectory) -> Vec<u8> {
    let mut buf = Vec::new();
    write_trajectory(&mut buf, &t.samples).unwrap();
    buf
}

fn criterion_9(s: &Scenario, sweep: &Sweep) -> Outcome {
    let mut identical = true;
    let kinds = [
        RunKind::ClosedLoop,
        RunKind::PfClosedLoop,
        RunKind::Reference(PlannerChoice::Tc),
        RunKind::Reference(PlannerChoice::TcDisc),
        RunKind::Reference(PlannerChoice::Pf),
    ];
    for kind in kinds {
        identical &= csv_bytes(&s.run(kind).unwrap()) == csv_bytes(&s.run(kind).unwrap());
    }
    // A parallel re-run of the seeded sweep matches the first one.
    let again = tc_sweep(s);
    identical &= again.starts == sweep.starts;
    identical &= again
        .tc
        .iter()
        .zip(&sweep.tc)
        .all(|(a, b)| csv_bytes(a) == csv_bytes(b));

    // Two invocations of the binary write the same file.
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("r{k}"));
        let status = Command::new(env!("CARGO_BIN_EXE_tubenav"))
            .args([
                "run",
                config_path().to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ])
            .env_remove("TUBENAV_OUT")
            .output()
            .unwrap()
            .status;
        identical &= status.success();
        files.push(std::fs::read(out.join("trajectory.csv")).unwrap_or_default());
    }
    identical &= !files[0].is_empty() && files[0] == files[1];
    outcome(
        identical,
        format!(
            "{} run kinds, the {STARTS}-start sweep and two CLI runs reproduce byte-identical CSV",
            kinds.len()
        ),
    )
}

fn main() {
    let (config, scenario) = load();
    let sweep = tc_sweep(&scenario);
    let closed = scenario.run(RunKind::ClosedLoop).unwrap();

    let mut failed = 0;
    let mut report = |k: usize, name: &str, o: Outcome| {
        println!(
            "criterion {k} {}: {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    };
    report(1, "world validation", criterion_1(&config));
    report(2, "planner saturation", criterion_2(&scenario, &sweep));
    report(
        3,
        "forward invariance and convergence",
        criterion_3(&scenario, &sweep),
    );
    report(4, "stationary points", criterion_4(&scenario));
    report(5, "tube tracking", criterion_5(&scenario, &closed));
    report(
        6,
        "potential-field contrast",
        criterion_6(&scenario, &closed),
    );
    report(7, "path-length comparison", criterion_7(&scenario, &sweep));
    report(8, "property suites", criterion_8(&scenario, &sweep));
    report(9, "determinism", criterion_9(&scenario, &sweep));
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
