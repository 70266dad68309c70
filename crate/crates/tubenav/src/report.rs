//! Multi-start comparison and sweep reports.

use rayon::prelude::*;
use serde::Serialize;

use tubenav_core::sim::{compute_metrics, sample_free_starts};
use tubenav_core::{Metrics, PlannerChoice, RunKind, Scenario, Termination, Trajectory, Vec2};

use crate::io::fmt_f64;

/// At most this many points are kept per path for plotting.
const PLOT_POINTS: usize = 1500;

/// Evenly thinned copy of `points`, always keeping the last one.
pub fn decimate(points: &[Vec2], max: usize) -> Vec<Vec2> {
    if points.len() <= max || max < 2 {
        return points.to_vec();
    }
    let stride = points.len().div_ceil(max - 1);
    let mut out: Vec<Vec2> = points.iter().step_by(stride).copied().collect();
    if let Some(&last) = points.last() {
        if out.last() != Some(&last) {
            out.push(last);
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRow {
    pub start_index: usize,
    pub start: [f64; 2],
    pub planner: PlannerChoice,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Metrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub path: Vec<Vec2>,
    #[serde(skip)]
    pub actual: Vec<Vec2>,
}

impl RunRow {
    pub fn succeeded(&self) -> bool {
        self.metrics
            .as_ref()
            .is_some_and(|m| m.reached_goal && !m.tube_violated)
    }
}

fn row(
    scenario: &Scenario,
    kind: RunKind,
    planner: PlannerChoice,
    index: usize,
    start: Vec2,
) -> RunRow {
    let (metrics, error, path, actual) = match scenario.run_from(kind, start) {
        Ok(t) => {
            let m = compute_metrics(&t);
            let reference: Vec<Vec2> = t.samples.iter().map(|s| s.reference).collect();
            let point: Vec<Vec2> = t.samples.iter().map(|s| s.point).collect();
            let error = match &m.termination {
                Termination::Fault { reason, .. } => Some(reason.clone()),
                _ => None,
            };
            (
                Some(m),
                error,
                decimate(&reference, PLOT_POINTS),
                decimate(&point, PLOT_POINTS),
            )
        }
        Err(e) => (None, Some(e.to_string()), Vec::new(), Vec::new()),
    };
    RunRow {
        start_index: index,
        start: start.into(),
        planner,
        metrics,
        error,
        path,
        actual,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PlannerSummary {
    pub planner: PlannerChoice,
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Over this planner's own successful starts.
    pub mean_path_length: Option<f64>,
    /// Over the starts where every compared planner succeeded.
    pub mean_path_length_common: Option<f64>,
    pub max_input: f64,
    pub min_clearance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub seed: u64,
    pub starts: Vec<[f64; 2]>,
    pub planners: Vec<PlannerChoice>,
    pub common_successes: usize,
    pub summary: Vec<PlannerSummary>,
    /// Start-major: row `i * planners.len() + j` is start `i`, planner `j`.
    pub rows: Vec<RunRow>,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Reference runs of every planner from the same starts.
pub fn compare(
    scenario: &Scenario,
    planners: &[PlannerChoice],
    starts: &[Vec2],
    seed: u64,
) -> ComparisonReport {
    let jobs: Vec<(usize, Vec2, PlannerChoice)> = starts
        .iter()
        .enumerate()
        .flat_map(|(i, &s)| planners.iter().map(move |&p| (i, s, p)))
        .collect();
    let rows: Vec<RunRow> = jobs
        .par_iter()
        .map(|&(i, s, p)| row(scenario, RunKind::Reference(p), p, i, s))
        .collect();

    let n = planners.len();
    let common: Vec<usize> = (0..starts.len())
        .filter(|&i| rows[i * n..(i + 1) * n].iter().all(RunRow::succeeded))
        .collect();
    let summary = planners
        .iter()
        .enumerate()
        .map(|(j, &planner)| {
            let own: Vec<&RunRow> = (0..starts.len()).map(|i| &rows[i * n + j]).collect();
            let ok: Vec<&Metrics> = own
                .iter()
                .filter(|r| r.succeeded())
                .filter_map(|r| r.metrics.as_ref())
                .collect();
            let all: Vec<&Metrics> = own.iter().filter_map(|r| r.metrics.as_ref()).collect();
            PlannerSummary {
                planner,
                runs: own.len(),
                successes: ok.len(),
                success_rate: if own.is_empty() {
                    0.0
                } else {
                    ok.len() as f64 / own.len() as f64
                },
                mean_path_length: mean(ok.iter().map(|m| m.path_length_ref)),
                mean_path_length_common: mean(
                    common
                        .iter()
                        .filter_map(|&i| rows[i * n + j].metrics.as_ref())
                        .map(|m| m.path_length_ref),
                ),
                max_input: all.iter().map(|m| m.max_input).fold(0.0, f64::max),
                min_clearance: all
                    .iter()
                    .map(|m| m.min_clearance_ref)
                    .fold(f64::INFINITY, f64::min),
            }
        })
        .collect();
    ComparisonReport {
        seed,
        starts: starts.iter().map(|&s| s.into()).collect(),
        planners: planners.to_vec(),
        common_successes: common.len(),
        summary,
        rows,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub runs: usize,
    pub reached_goal: usize,
    pub tube_violations: usize,
    pub faults: usize,
    pub max_error: f64,
    pub max_input: f64,
    pub min_clearance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub seed: u64,
    pub mode: &'static str,
    pub summary: SweepSummary,
    pub rows: Vec<RunRow>,
}

/// Closed-loop (or reference-only) runs from every start.
pub fn sweep(scenario: &Scenario, kind: RunKind, starts: &[Vec2], seed: u64) -> SweepReport {
    let planner = match kind {
        RunKind::Reference(p) => p,
        RunKind::ClosedLoop => PlannerChoice::Tc,
        RunKind::PfClosedLoop => PlannerChoice::Pf,
    };
    let rows: Vec<RunRow> = starts
        .par_iter()
        .enumerate()
        .map(|(i, &s)| row(scenario, kind, planner, i, s))
        .collect();
    let metrics: Vec<&Metrics> = rows.iter().filter_map(|r| r.metrics.as_ref()).collect();
    let summary = SweepSummary {
        runs: rows.len(),
        reached_goal: metrics.iter().filter(|m| m.reached_goal).count(),
        tube_violations: metrics.iter().filter(|m| m.tube_violated).count(),
        faults: rows.iter().filter(|r| r.error.is_some()).count(),
        max_error: metrics.iter().map(|m| m.max_error).fold(0.0, f64::max),
        max_input: metrics.iter().map(|m| m.max_input).fold(0.0, f64::max),
        min_clearance: metrics
            .iter()
            .map(|m| m.min_clearance_act)
            .fold(f64::INFINITY, f64::min),
    };
    SweepReport {
        seed,
        mode: match kind {
            RunKind::Reference(_) => "reference",
            _ => "closed_loop",
        },
        summary,
        rows,
    }
}

/// Seeded starts, identical across verbs for the same world and seed.
pub fn starts(scenario: &Scenario, count: usize, seed: u64) -> Vec<Vec2> {
    sample_free_starts(&scenario.world, count, seed)
}

pub const ROW_HEADER: [&str; 15] = [
    "start_index",
    "start_x",
    "start_y",
    "planner",
    "status",
    "path_length_ref",
    "path_length_act",
    "min_clearance_ref",
    "min_clearance_act",
    "max_error",
    "max_input",
    "terminal_error",
    "final_time",
    "reached_goal",
    "error",
];

fn status(r: &RunRow) -> &'static str {
    match r.metrics.as_ref().map(|m| &m.termination) {
        None => "error",
        Some(Termination::GoalReached) => "goal_reached",
        Some(Termination::Elapsed) => "elapsed",
        Some(Termination::TubeViolation { .. }) => "tube_violation",
        Some(Termination::Fault { .. }) => "fault",
    }
}

pub fn table_rows(rows: &[RunRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            let mut cells = vec![
                r.start_index.to_string(),
                fmt_f64(r.start[0]),
                fmt_f64(r.start[1]),
                r.planner.name().to_string(),
                status(r).to_string(),
            ];
            match &r.metrics {
                Some(m) => cells.extend(
                    [
                        m.path_length_ref,
                        m.path_length_act,
                        m.min_clearance_ref,
                        m.min_clearance_act,
                        m.max_error,
                        m.max_input,
                        m.terminal_error,
                        m.final_time,
                    ]
                    .map(fmt_f64)
                    .into_iter()
                    .chain([m.reached_goal.to_string()]),
                ),
                None => cells.extend(std::iter::repeat_n(String::new(), 9)),
            }
            cells.push(r.error.clone().unwrap_or_default());
            cells
        })
        .collect()
}

/// Speed of the reference over time, `(t, |tau|)`.
pub fn speed_series(t: &Trajectory) -> Vec<(f64, f64)> {
    t.samples.iter().map(|s| (s.t, s.u.norm())).collect()
}
