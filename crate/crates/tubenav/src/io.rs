//! Trajectory CSV and JSON artifacts.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;
use tubenav_core::{Pose, Sample, Termination, Vec2};

pub const TRAJECTORY_HEADER: [&str; 15] = [
    "t", "xd_x", "xd_y", "x", "y", "theta", "px", "py", "xe_norm", "xi", "u_v", "u_w", "dhat",
    "dO_ref", "dO_act",
];

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("row {row}: {reason}")]
    Format { row: usize, reason: String },
}

fn create(path: &Path) -> Result<BufWriter<File>, IoError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| IoError::File {
            path: path.display().to_string(),
            source,
        })
}

/// Shortest text that parses back to the same value; 17 significant digits
/// in exponent form.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn row(s: &Sample) -> [f64; 15] {
    [
        s.t,
        s.reference.x,
        s.reference.y,
        s.pose.x,
        s.pose.y,
        s.pose.theta,
        s.point.x,
        s.point.y,
        s.error_norm,
        s.xi,
        s.u.x,
        s.u.y,
        s.estimate,
        s.clearance_ref,
        s.clearance_act,
    ]
}

pub fn write_trajectory<W: Write>(out: W, samples: &[Sample]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for s in samples {
        w.write_record(row(s).iter().map(|v| fmt_f64(*v)))?;
    }
    w.flush().map_err(|source| IoError::File {
        path: "<trajectory>".into(),
        source,
    })?;
    Ok(())
}

pub fn write_trajectory_file(path: &Path, samples: &[Sample]) -> Result<(), IoError> {
    write_trajectory(create(path)?, samples)
}

/// Inverse of [`write_trajectory`].
pub fn read_trajectory<R: Read>(input: R) -> Result<Vec<Sample>, IoError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(TRAJECTORY_HEADER) {
        return Err(IoError::Format {
            row: 0,
            reason: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let mut v = [0.0; 15];
        for (slot, field) in v.iter_mut().zip(rec.iter()) {
            *slot = field.parse().map_err(|_| IoError::Format {
                row: i + 1,
                reason: format!("not a number: {field:?}"),
            })?;
        }
        out.push(Sample {
            t: v[0],
            reference: Vec2::new(v[1], v[2]),
            pose: Pose::new(v[3], v[4], v[5]),
            point: Vec2::new(v[6], v[7]),
            error_norm: v[8],
            xi: v[9],
            u: Vec2::new(v[10], v[11]),
            estimate: v[12],
            clearance_ref: v[13],
            clearance_act: v[14],
        });
    }
    Ok(out)
}

/// Pretty JSON followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|source| IoError::File {
            path: path.display().to_string(),
            source,
        })
}

/// Plain CSV table with a header; floats use [`fmt_f64`].
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

pub fn describe_termination(t: &Termination) -> String {
    match t {
        Termination::GoalReached => "goal reached".into(),
        Termination::Elapsed => "duration elapsed before reaching the goal".into(),
        Termination::TubeViolation { t, xi } => {
            format!("tracking error left the tube at t = {t:.3} s (xi = {xi:.6})")
        }
        Termination::Fault { t, reason } => format!("fault at t = {t:.3} s: {reason}"),
    }
}
