//! Command-line front end.
//!
//! Exit codes: 0 success, 1 world or parameter check failed, 2 tube
//! violation, 3 configuration or usage error, 4 run ended without reaching
//! the goal (time elapsed or field fault), 5 artifacts could not be written.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tubenav_core::sim::compute_metrics;
use tubenav_core::{Metrics, PlannerChoice, RunKind, Scenario, Trajectory, Vec2};

use crate::config::{load_config, ConfigError, ScenarioConfig};
use crate::io::{describe_termination, write_json, write_table, write_trajectory_file, IoError};
use crate::plot::{series_svg, world_svg, PathLayer, Series, PALETTE};
use crate::report::{self, decimate, ComparisonReport, SweepReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_TUBE_VIOLATION: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_INCOMPLETE: i32 = 4;
pub const EXIT_IO: i32 = 5;

pub const OUT_ENV: &str = "TUBENAV_OUT";
const DEFAULT_OUT: &str = "tubenav-out";

#[derive(Debug, Parser)]
#[command(
    name = "tubenav",
    version,
    about = "Tangent-cone planning and tube-following control in 2D worlds"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the world separation and the input bound against the input limit.
    Validate { config: PathBuf },
    /// Simulate one run from the configured start.
    Run(RunArgs),
    /// Compare planners over seeded starts.
    Compare(CompareArgs),
    /// Multi-start run of one planner.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlannerArg {
    Tc,
    TcDisc,
    Pf,
}

impl From<PlannerArg> for PlannerChoice {
    fn from(p: PlannerArg) -> Self {
        match p {
            PlannerArg::Tc => PlannerChoice::Tc,
            PlannerArg::TcDisc => PlannerChoice::TcDisc,
            PlannerArg::Pf => PlannerChoice::Pf,
        }
    }
}

#[derive(Debug, Args)]
struct Common {
    config: PathBuf,
    /// Output directory.
    #[arg(long, env = OUT_ENV)]
    out: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    duration: Option<f64>,
    /// Seed for the sampled starts.
    #[arg(long)]
    seed: Option<u64>,
    /// Saturate commands at U (default: the robot input limit).
    #[arg(long, value_name = "U", num_args = 0..=1, require_equals = true)]
    clamp_input: Option<Option<f64>>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Integrate the planner only.
    #[arg(long)]
    reference_only: bool,
    #[arg(long, value_enum, default_value = "tc")]
    planner: PlannerArg,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    common: Common,
    /// Planners to compare (repeat or separate with commas; at least two).
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["tc", "pf"])]
    planner: Vec<PlannerArg>,
    #[arg(long, default_value_t = 20)]
    starts: usize,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    reference_only: bool,
    #[arg(long, value_enum, default_value = "tc")]
    planner: PlannerArg,
    #[arg(long, default_value_t = 20)]
    starts: usize,
}

/// Failure that ends a command with a specific exit code.
struct Exit {
    code: i32,
    message: String,
}

impl Exit {
    fn usage(message: impl Into<String>) -> Exit {
        Exit {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<ConfigError> for Exit {
    fn from(e: ConfigError) -> Self {
        Exit {
            code: EXIT_CONFIG,
            message: format!("config error: {e}"),
        }
    }
}

impl From<IoError> for Exit {
    fn from(e: IoError) -> Self {
        Exit {
            code: EXIT_IO,
            message: format!("cannot write artifacts: {e}"),
        }
    }
}

fn io_exit(path: &Path, e: std::io::Error) -> Exit {
    Exit {
        code: EXIT_IO,
        message: format!("cannot write {}: {e}", path.display()),
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Validate { config } => cmd_validate(&config),
        Command::Run(a) => cmd_run(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::Sweep(a) => cmd_sweep(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("tubenav: {}", e.message);
            e.code
        }
    }
}

/// Compact decimal form: at most six decimals, trailing zeros dropped.
fn short(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

struct Loaded {
    config: ScenarioConfig,
    scenario: Scenario,
    base: Option<PathBuf>,
}

fn load(common: &Common) -> Result<Loaded, Exit> {
    let mut config = load_config(&common.config)?;
    if let Some(dt) = common.dt {
        config.sim.dt = dt;
    }
    if let Some(d) = common.duration {
        config.sim.duration = d;
    }
    if let Some(s) = common.seed {
        config.sim.seed = s;
    }
    match common.clamp_input {
        Some(Some(u)) => config.sim.input_clamp = Some(u),
        Some(None) => config.sim.input_clamp = Some(config.robot.input_limit),
        None => {}
    }
    let base = common.config.parent().map(Path::to_path_buf);
    let scenario = config.to_scenario(base.as_deref()).map_err(|mut e| {
        e.file.get_or_insert_with(|| common.config.clone());
        Exit::from(e)
    })?;
    Ok(Loaded {
        config,
        scenario,
        base,
    })
}

/// The world must satisfy the separation assumptions before anything runs.
fn check_world(scenario: &Scenario) -> Result<(), Exit> {
    let report = scenario.world.validate();
    if report.is_ok() {
        return Ok(());
    }
    let mut message = String::from("world violates its separation assumptions:");
    for v in &report.violations {
        message.push_str(&format!("\n  - {v}"));
    }
    Err(Exit {
        code: EXIT_INVALID,
        message,
    })
}

fn out_dir(common: &Common, loaded: &Loaded) -> Result<PathBuf, Exit> {
    let dir = match (&common.out, &loaded.config.output_dir) {
        (Some(d), _) => d.clone(),
        (None, Some(d)) => match &loaded.base {
            Some(b) => b.join(d),
            None => PathBuf::from(d),
        },
        (None, None) => PathBuf::from(DEFAULT_OUT),
    };
    std::fs::create_dir_all(&dir).map_err(|e| io_exit(&dir, e))?;
    Ok(dir)
}

fn write_text(path: &Path, text: &str) -> Result<(), Exit> {
    std::fs::write(path, text).map_err(|e| io_exit(path, e))
}

fn cmd_validate(path: &Path) -> Result<i32, Exit> {
    let config = load_config(path)?;
    let base = path.parent();
    let scenario = config.to_scenario(base).map_err(|mut e| {
        e.file.get_or_insert_with(|| path.to_path_buf());
        Exit::from(e)
    })?;
    let world = &scenario.world;
    let report = world.validate();
    let mut failed = false;

    println!(
        "world: {} obstacles, robot radius {}, clearance {}, margin {}, influence {}",
        world.obstacles.len(),
        short(world.robot_radius),
        short(world.clearance),
        short(world.margin),
        short(world.influence)
    );
    if let Some((i, j, d)) = report.min_pair_clearance {
        println!("minimum obstacle separation: {d:.6} m (obstacles {i} and {j})");
    }
    for m in &report.marginal {
        println!("warning: close to the limit: {}", m.what);
    }
    if report.is_ok() {
        println!("separation checks: ok");
    } else {
        failed = true;
        for v in &report.violations {
            println!("violation: {v}");
        }
    }

    let bound = scenario
        .controller
        .input_bound(scenario.planner.alpha, scenario.robot.offset);
    let limit = scenario.robot.input_limit;
    println!(
        "input bound (k*rho + alpha + d_m + delta) / |offset| = {} (input limit {})",
        short(bound),
        short(limit)
    );
    if bound > limit {
        failed = true;
        println!(
            "violation: input bound {} exceeds the input limit {}; lower the gain, tube radius, \
             alpha or disturbance bound, or increase |offset|",
            short(bound),
            short(limit)
        );
    }
    let d = scenario.disturbance.bound();
    if d > scenario.controller.bound {
        println!(
            "warning: declared disturbance bound {} exceeds the controller's disturbance bound {}",
            short(d),
            short(scenario.controller.bound)
        );
    }
    Ok(if failed { EXIT_INVALID } else { EXIT_OK })
}

#[derive(Serialize)]
struct RunDocument<'a> {
    config: String,
    mode: &'static str,
    planner: PlannerChoice,
    input_bound: f64,
    input_limit: f64,
    tube_radius: f64,
    metrics: &'a Metrics,
}

fn exit_for(m: &Metrics) -> i32 {
    if m.tube_violated {
        EXIT_TUBE_VIOLATION
    } else if m.reached_goal {
        EXIT_OK
    } else {
        EXIT_INCOMPLETE
    }
}

fn trajectory_plot(scenario: &Scenario, t: &Trajectory, closed_loop: bool, label: &str) -> String {
    let reference: Vec<Vec2> = t.samples.iter().map(|s| s.reference).collect();
    let reference = decimate(&reference, 4000);
    let mut layers = vec![PathLayer {
        label: if closed_loop { "reference" } else { label },
        points: reference.clone(),
        color: PALETTE[0],
        dashed: closed_loop,
        width: 1.5,
    }];
    if closed_loop {
        let actual: Vec<Vec2> = t.samples.iter().map(|s| s.point).collect();
        layers.push(PathLayer {
            label: "actual",
            points: decimate(&actual, 4000),
            color: PALETTE[1],
            dashed: false,
            width: 1.5,
        });
    }
    let tube = closed_loop.then_some((reference.as_slice(), scenario.controller.tube_radius));
    world_svg(&scenario.world, tube, &layers, scenario.planner.goal)
}

fn cmd_run(a: &RunArgs) -> Result<i32, Exit> {
    let planner = PlannerChoice::from(a.planner);
    let kind =
        if a.reference_only {
            RunKind::Reference(planner)
        } else {
            match planner {
                PlannerChoice::Tc => RunKind::ClosedLoop,
                PlannerChoice::Pf => RunKind::PfClosedLoop,
                PlannerChoice::TcDisc => return Err(Exit::usage(
                    "closed-loop runs support --planner tc or pf; use --reference-only for tc-disc",
                )),
            }
        };
    let loaded = load(&a.common)?;
    let s = &loaded.scenario;
    check_world(s)?;
    let t = s
        .run(kind)
        .map_err(|e| Exit::usage(format!("cannot start run: {e}")))?;
    let m = compute_metrics(&t);

    let dir = out_dir(&a.common, &loaded)?;
    write_trajectory_file(&dir.join("trajectory.csv"), &t.samples)?;
    let doc = RunDocument {
        config: a.common.config.display().to_string(),
        mode: if a.reference_only {
            "reference"
        } else {
            "closed_loop"
        },
        planner,
        input_bound: s.controller.input_bound(s.planner.alpha, s.robot.offset),
        input_limit: s.robot.input_limit,
        tube_radius: s.controller.tube_radius,
        metrics: &m,
    };
    write_json(&dir.join("metrics.json"), &doc)?;
    write_text(
        &dir.join("trajectory.svg"),
        &trajectory_plot(s, &t, !a.reference_only, planner.name()),
    )?;

    println!(
        "{}: {}",
        planner.name(),
        describe_termination(&m.termination)
    );
    println!("  final time        {:.2} s", m.final_time);
    println!(
        "  path length       {:.4} m (reference), {:.4} m (actual)",
        m.path_length_ref, m.path_length_act
    );
    println!(
        "  min clearance     {:.4} m (reference), {:.4} m (actual)",
        m.min_clearance_ref, m.min_clearance_act
    );
    if !a.reference_only {
        println!(
            "  max tracking err  {:.3e} m (tube radius {})",
            m.max_error,
            short(s.controller.tube_radius)
        );
    }
    println!("  max input norm    {:.4}", m.max_input);
    println!("  artifacts         {}", dir.display());
    Ok(exit_for(&m))
}

fn distinct(planners: &[PlannerArg]) -> Vec<PlannerChoice> {
    let mut out: Vec<PlannerChoice> = Vec::new();
    for &p in planners {
        let p = PlannerChoice::from(p);
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

fn paths_plot(
    scenario: &Scenario,
    rows: &[report::RunRow],
    planners: &[PlannerChoice],
    actual: bool,
) -> String {
    let mut labelled = Vec::new();
    let layers: Vec<PathLayer> = rows
        .iter()
        .map(|r| {
            let j = planners.iter().position(|&p| p == r.planner).unwrap_or(0);
            let label = if labelled.contains(&j) {
                ""
            } else {
                labelled.push(j);
                r.planner.name()
            };
            PathLayer {
                label,
                points: if actual {
                    r.actual.clone()
                } else {
                    r.path.clone()
                },
                color: PALETTE[j % PALETTE.len()],
                dashed: j % 2 == 1,
                width: 1.0,
            }
        })
        .collect();
    world_svg(&scenario.world, None, &layers, scenario.planner.goal)
}

fn cmd_compare(a: &CompareArgs) -> Result<i32, Exit> {
    let planners = distinct(&a.planner);
    if planners.len() < 2 {
        return Err(Exit::usage("compare needs at least two distinct planners"));
    }
    if a.starts == 0 {
        return Err(Exit::usage("--starts must be at least 1"));
    }
    let loaded = load(&a.common)?;
    let s = &loaded.scenario;
    check_world(s)?;
    let seed = s.sim.seed;
    let starts = report::starts(s, a.starts, seed);
    let rep: ComparisonReport = report::compare(s, &planners, &starts, seed);

    // Speed profiles from the configured start.
    let origin = tubenav_core::kinematics::virtual_point(&s.robot, &s.sim.initial_pose);
    let profiles: Vec<(PlannerChoice, Vec<(f64, f64)>)> = planners
        .iter()
        .map(|&p| {
            let series = s
                .run_from(RunKind::Reference(p), origin)
                .map(|t| report::speed_series(&t))
                .unwrap_or_default();
            (p, series)
        })
        .collect();

    let dir = out_dir(&a.common, &loaded)?;
    write_table(
        &dir.join("compare.csv"),
        &report::ROW_HEADER,
        &report::table_rows(&rep.rows),
    )?;
    write_json(&dir.join("compare.json"), &rep)?;
    let speed_rows: Vec<Vec<String>> = profiles
        .iter()
        .flat_map(|(p, series)| {
            series.iter().map(move |&(t, v)| {
                vec![
                    p.name().to_string(),
                    crate::io::fmt_f64(t),
                    crate::io::fmt_f64(v),
                ]
            })
        })
        .collect();
    write_table(
        &dir.join("speed.csv"),
        &["planner", "t", "speed"],
        &speed_rows,
    )?;
    let series: Vec<Series> = profiles
        .iter()
        .enumerate()
        .map(|(j, (p, pts))| Series {
            label: p.name(),
            points: pts.clone(),
            color: PALETTE[j % PALETTE.len()],
        })
        .collect();
    write_text(
        &dir.join("speed.svg"),
        &series_svg(
            "Reference speed from the configured start",
            "|tau| [m/s]",
            &series,
            Some((s.planner.alpha, "alpha")),
        ),
    )?;
    write_text(
        &dir.join("paths.svg"),
        &paths_plot(s, &rep.rows, &planners, false),
    )?;

    println!(
        "{} starts (seed {seed}), {} common successes",
        starts.len(),
        rep.common_successes
    );
    println!(
        "{:<8} {:>9} {:>14} {:>14} {:>10} {:>10}",
        "planner", "success", "mean length", "common length", "max speed", "min clear"
    );
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
    for p in &rep.summary {
        println!(
            "{:<8} {:>4}/{:<4} {:>14} {:>14} {:>10.4} {:>10.4}",
            p.planner.name(),
            p.successes,
            p.runs,
            opt(p.mean_path_length),
            opt(p.mean_path_length_common),
            p.max_input,
            p.min_clearance
        );
    }
    println!("artifacts: {}", dir.display());
    Ok(EXIT_OK)
}

fn cmd_sweep(a: &SweepArgs) -> Result<i32, Exit> {
    let planner = PlannerChoice::from(a.planner);
    let kind = if a.reference_only {
        RunKind::Reference(planner)
    } else {
        match planner {
            PlannerChoice::Tc => RunKind::ClosedLoop,
            PlannerChoice::Pf => RunKind::PfClosedLoop,
            PlannerChoice::TcDisc => return Err(Exit::usage(
                "closed-loop sweeps support --planner tc or pf; use --reference-only for tc-disc",
            )),
        }
    };
    if a.starts == 0 {
        return Err(Exit::usage("--starts must be at least 1"));
    }
    let loaded = load(&a.common)?;
    let s = &loaded.scenario;
    check_world(s)?;
    let seed = s.sim.seed;
    let starts = report::starts(s, a.starts, seed);
    let rep: SweepReport = report::sweep(s, kind, &starts, seed);

    let dir = out_dir(&a.common, &loaded)?;
    write_table(
        &dir.join("sweep.csv"),
        &report::ROW_HEADER,
        &report::table_rows(&rep.rows),
    )?;
    write_json(&dir.join("sweep.json"), &rep)?;
    write_text(
        &dir.join("sweep.svg"),
        &paths_plot(s, &rep.rows, &[planner], !a.reference_only),
    )?;

    let sum = &rep.summary;
    println!(
        "{} {} runs (seed {seed}): {} reached the goal, {} tube violations, {} faults",
        sum.runs, rep.mode, sum.reached_goal, sum.tube_violations, sum.faults
    );
    println!(
        "max tracking error {:.3e} m, max input {:.4}, min clearance {:.4} m",
        sum.max_error, sum.max_input, sum.min_clearance
    );
    println!("artifacts: {}", dir.display());
    Ok(if sum.tube_violations > 0 {
        EXIT_TUBE_VIOLATION
    } else if sum.reached_goal == sum.runs {
        EXIT_OK
    } else {
        EXIT_INCOMPLETE
    })
}
