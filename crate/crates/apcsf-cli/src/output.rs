//! File outputs: diagnostics CSV and SVG snapshot frames.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use apcsf::{PolygonCurve, TrajectoryRecord, Vec2};

/// Write `contents` to `path` atomically: a temporary sibling file is
/// renamed over the target on success.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

/// Diagnostics CSV over the recorded steps. Floating point values use the
/// shortest round-trip representation, so identical runs produce identical
/// bytes.
pub fn diagnostics_csv(traj: &TrajectoryRecord) -> String {
    let mut out = String::from("step,t,perimeter,area,min_edge,min_fan_area,max_speed\n");
    for (i, d) in traj.diagnostics.iter().enumerate() {
        let step = if i + 1 == traj.len() { traj.total_steps } else { i * traj.record_every };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            step, traj.times[i], d.perimeter, d.area, d.min_edge, d.min_fan_area, d.max_speed
        );
    }
    out
}

/// Fixed viewport covering `curve`'s bounding box padded by 20%.
pub struct Viewport {
    min: Vec2,
    max: Vec2,
}

impl Viewport {
    pub fn around(curve: &PolygonCurve) -> Viewport {
        let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in curve.vertices() {
            min.x = min.x.min(v.x);
            min.y = min.y.min(v.y);
            max.x = max.x.max(v.x);
            max.y = max.y.max(v.y);
        }
        let pad = 0.2 * (max.x - min.x).max(max.y - min.y).max(f64::MIN_POSITIVE);
        Viewport { min: min - Vec2::new(pad, pad), max: max + Vec2::new(pad, pad) }
    }
}

/// One closed-polygon SVG frame; the y axis is flipped so the plane is drawn
/// with y upward.
pub fn svg_frame(curve: &PolygonCurve, viewport: &Viewport) -> String {
    let w = viewport.max.x - viewport.min.x;
    let h = viewport.max.y - viewport.min.y;
    let stroke = 0.005 * w.max(h);
    let mut points = String::new();
    for v in curve.vertices() {
        let _ = write!(points, "{},{} ", v.x, -v.y);
    }
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" ",
            "width=\"480\" height=\"480\">\n",
            "<polygon points=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{}\"/>\n",
            "</svg>\n"
        ),
        viewport.min.x,
        -viewport.max.y,
        w,
        h,
        points.trim_end(),
        stroke
    )
}

/// One zero-padded SVG file per recorded snapshot.
pub fn write_svg_frames(dir: &Path, traj: &TrajectoryRecord) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let viewport = Viewport::around(traj.initial());
    for (i, snapshot) in traj.snapshots.iter().enumerate() {
        let path = dir.join(format!("frame_{i:06}.svg"));
        write_atomic(&path, &svg_frame(snapshot, &viewport))?;
    }
    Ok(())
}
