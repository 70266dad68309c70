//! Minimal SVG plots: the world with paths, and time series.

use std::fmt::Write;

use tubenav_core::{Vec2, Workspace, World};

const WIDTH: f64 = 900.0;
const PAD: f64 = 40.0;
pub const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// A polyline in world coordinates.
pub struct PathLayer<'a> {
    pub label: &'a str,
    pub points: Vec<Vec2>,
    pub color: &'a str,
    pub dashed: bool,
    pub width: f64,
}

/// World-to-pixel map with y pointing up.
struct Frame {
    lo: Vec2,
    scale: f64,
    height: f64,
}

impl Frame {
    fn new(lo: Vec2, hi: Vec2) -> Frame {
        let scale = (WIDTH - 2.0 * PAD) / (hi.x - lo.x);
        let height = (hi.y - lo.y) * scale + 2.0 * PAD;
        Frame { lo, scale, height }
    }

    fn x(&self, x: f64) -> f64 {
        PAD + (x - self.lo.x) * self.scale
    }

    fn y(&self, y: f64) -> f64 {
        self.height - PAD - (y - self.lo.y) * self.scale
    }

    fn len(&self, l: f64) -> f64 {
        l * self.scale
    }
}

fn header(out: &mut String, height: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

fn polyline(out: &mut String, pts: impl Iterator<Item = (f64, f64)>, style: &str) {
    let mut d = String::new();
    for (i, (x, y)) in pts.enumerate() {
        let _ = write!(d, "{}{x:.2},{y:.2}", if i == 0 { "M" } else { " L" });
    }
    if !d.is_empty() {
        let _ = writeln!(out, r#"<path d="{d}" fill="none" {style}/>"#);
    }
}

fn circle(out: &mut String, f: &Frame, c: Vec2, r: f64, style: &str) {
    let _ = writeln!(
        out,
        r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" {style}/>"#,
        f.x(c.x),
        f.y(c.y),
        f.len(r)
    );
}

fn legend(out: &mut String, x: f64, entries: &[(&str, &str, bool)]) {
    let shown = entries.iter().filter(|e| !e.0.is_empty());
    for (i, (label, color, dashed)) in shown.enumerate() {
        let y = 16.0 + 16.0 * i as f64;
        let dash = if *dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let _ = writeln!(
            out,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"{dash}/><text x="{}" y="{}">{}</text>"#,
            x + 24.0,
            x + 30.0,
            y + 4.0,
            escape(label)
        );
    }
}

/// Tick label with three significant digits.
fn tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let digits = (2 - v.abs().log10().floor() as i32).max(0) as usize;
    format!("{v:.digits$}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Workspace, obstacles with their margin annulus and influence circle, an
/// optional tube of radius `tube.1` around `tube.0`, and the given paths.
pub fn world_svg(
    world: &World,
    tube: Option<(&[Vec2], f64)>,
    paths: &[PathLayer],
    goal: Vec2,
) -> String {
    let (lo, hi) = world.workspace.bounds();
    let f = Frame::new(lo, hi);
    let mut out = String::new();
    header(&mut out, f.height);

    let inset = world.robot_radius + world.margin;
    match world.workspace {
        Workspace::Rectangle {
            center,
            half_extents,
        } => {
            let rect = |out: &mut String, h: Vec2, style: &str| {
                let _ = writeln!(
                    out,
                    r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" {style}/>"#,
                    f.x(center.x - h.x),
                    f.y(center.y + h.y),
                    f.len(2.0 * h.x),
                    f.len(2.0 * h.y)
                );
            };
            rect(
                &mut out,
                half_extents,
                r##"fill="#f3d9d9" stroke="black" stroke-width="2""##,
            );
            rect(
                &mut out,
                half_extents - Vec2::new(inset, inset),
                r#"fill="white" stroke="none""#,
            );
        }
        Workspace::Disc { center, radius } => {
            circle(
                &mut out,
                &f,
                center,
                radius,
                r##"fill="#f3d9d9" stroke="black" stroke-width="2""##,
            );
            circle(
                &mut out,
                &f,
                center,
                radius - inset,
                r#"fill="white" stroke="none""#,
            );
        }
    }

    for (i, o) in world.obstacles.iter().enumerate() {
        let inflated = o.radius + world.robot_radius;
        circle(
            &mut out,
            &f,
            o.center,
            inflated + world.influence,
            r##"fill="none" stroke="#888" stroke-dasharray="4 3""##,
        );
        circle(
            &mut out,
            &f,
            o.center,
            inflated + world.margin,
            r##"fill="#f3d9d9" stroke="none""##,
        );
        circle(
            &mut out,
            &f,
            o.center,
            inflated,
            r##"fill="#e8b4b4" stroke="none""##,
        );
        circle(
            &mut out,
            &f,
            o.center,
            o.radius,
            r##"fill="#555" stroke="none""##,
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" fill="white" text-anchor="middle" dy="4">{i}</text>"#,
            f.x(o.center.x),
            f.y(o.center.y)
        );
    }

    if let Some((center, radius)) = tube {
        polyline(
            &mut out,
            center.iter().map(|p| (f.x(p.x), f.y(p.y))),
            &format!(
                r##"stroke="#1f77b4" stroke-opacity="0.18" stroke-width="{:.2}" stroke-linecap="round" stroke-linejoin="round""##,
                f.len(2.0 * radius).max(1.0)
            ),
        );
    }

    for p in paths {
        let dash = if p.dashed {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        polyline(
            &mut out,
            p.points.iter().map(|q| (f.x(q.x), f.y(q.y))),
            &format!(r#"stroke="{}" stroke-width="{}"{dash}"#, p.color, p.width),
        );
        if let Some(s) = p.points.first() {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
                f.x(s.x),
                f.y(s.y),
                p.color
            );
        }
    }
    let _ = writeln!(
        out,
        r##"<path d="M{x:.2},{y:.2} m-6,0 l12,0 m-6,-6 l0,12" stroke="#2ca02c" stroke-width="3"/>"##,
        x = f.x(goal.x),
        y = f.y(goal.y)
    );
    let entries: Vec<_> = paths.iter().map(|p| (p.label, p.color, p.dashed)).collect();
    legend(&mut out, PAD, &entries);
    out.push_str("</svg>\n");
    out
}

/// One line of a time-series plot.
pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
    pub color: &'a str,
}

/// Line plot with axes and an optional dashed horizontal reference line.
pub fn series_svg(
    title: &str,
    y_label: &str,
    series: &[Series],
    hline: Option<(f64, &str)>,
) -> String {
    let height = 420.0;
    let (mut x_max, mut y_max) = (0.0f64, 0.0f64);
    for s in series {
        for &(x, y) in &s.points {
            if x.is_finite() && y.is_finite() {
                x_max = x_max.max(x);
                y_max = y_max.max(y);
            }
        }
    }
    if let Some((h, _)) = hline {
        y_max = y_max.max(h);
    }
    let x_max = if x_max > 0.0 { x_max } else { 1.0 };
    let y_max = if y_max > 0.0 { 1.1 * y_max } else { 1.0 };
    let left = 70.0;
    let sx = |x: f64| left + x / x_max * (WIDTH - left - PAD);
    let sy = |y: f64| height - PAD - y / y_max * (height - 2.0 * PAD);

    let mut out = String::new();
    header(&mut out, height);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        PAD / 2.0,
        escape(title)
    );
    polyline(
        &mut out,
        [
            (sx(0.0), sy(y_max)),
            (sx(0.0), sy(0.0)),
            (sx(x_max), sy(0.0)),
        ]
        .into_iter(),
        r#"stroke="black""#,
    );
    for k in 0..=4 {
        let v = y_max * k as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            left - 6.0,
            sy(v) + 4.0,
            tick(v)
        );
        let t = x_max * k as f64 / 4.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{t:.0}</text>"#,
            sx(t),
            height - PAD + 16.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="end">t [s]</text><text x="12" y="{:.1}" transform="rotate(-90 12 {:.1})" text-anchor="middle">{}</text>"#,
        WIDTH - PAD,
        height - 6.0,
        height / 2.0,
        height / 2.0,
        escape(y_label)
    );
    let mut entries = Vec::new();
    if let Some((h, label)) = hline {
        polyline(
            &mut out,
            [(sx(0.0), sy(h)), (sx(x_max), sy(h))].into_iter(),
            r#"stroke="black" stroke-dasharray="6 4""#,
        );
        entries.push((label, "black", true));
    }
    for s in series {
        polyline(
            &mut out,
            s.points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| (sx(x), sy(y))),
            &format!(r#"stroke="{}" stroke-width="1.5""#, s.color),
        );
        entries.push((s.label, s.color, false));
    }
    legend(&mut out, WIDTH - 220.0, &entries);
    out.push_str("</svg>\n");
    out
}
