//! Initial curves and their nodal interpolants.
//!
//! An [`InitialCurve`] is a `2*pi`-periodic map of the parameter circle that
//! can be sampled at grid nodes; [`interpolate`] turns it into the polygon
//! whose vertex `j` is exactly the curve value at node `xi_j`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{Grid, PolygonCurve};
use crate::vec2::Vec2;

/// A periodic initial curve, evaluable at any parameter value.
#[derive(Clone, Debug)]
pub enum InitialCurve {
    /// `(a cos xi, b sin xi)`.
    Ellipse { a: f64, b: f64 },
    /// `(r cos xi, r sin xi)`.
    Circle { r: f64 },
    /// Piecewise linear in parameter through `(xi_i, point_i)` samples,
    /// sorted by `xi` in `[0, 2*pi)`.
    Table(Vec<(f64, Vec2)>),
}

impl InitialCurve {
    pub fn ellipse(a: f64, b: f64) -> Result<InitialCurve> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ellipse semi-axes must be positive, got {a}, {b}"
            )));
        }
        Ok(InitialCurve::Ellipse { a, b })
    }

    pub fn circle(r: f64) -> Result<InitialCurve> {
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "circle radius must be positive, got {r}"
            )));
        }
        Ok(InitialCurve::Circle { r })
    }

    /// Table curve from explicit `(xi, point)` samples.
    pub fn table(mut samples: Vec<(f64, Vec2)>) -> Result<InitialCurve> {
        if samples.len() < 3 {
            return Err(Error::InvalidN(samples.len()));
        }
        samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let tau = std::f64::consts::TAU;
        if samples[0].0 < 0.0 || samples[samples.len() - 1].0 >= tau {
            return Err(Error::InvalidParameter("table parameters must lie in [0, 2*pi)".into()));
        }
        for w in samples.windows(2) {
            if w[1].0 == w[0].0 {
                return Err(Error::InvalidParameter(format!(
                    "duplicate table parameter {}",
                    w[0].0
                )));
            }
        }
        Ok(InitialCurve::Table(samples))
    }

    /// Polygon file as a table curve with uniformly spaced parameters.
    pub fn from_polygon_file(path: impl AsRef<Path>) -> Result<InitialCurve> {
        let poly = PolygonCurve::from_file(path)?;
        let n = poly.n();
        let step = std::f64::consts::TAU / n as f64;
        let samples =
            poly.vertices().iter().enumerate().map(|(j, &v)| (j as f64 * step, v)).collect();
        InitialCurve::table(samples)
    }

    /// Evaluate the curve at parameter `xi` (any real; reduced mod `2*pi`).
    /// Table curves are linear in parameter between samples.
    pub fn eval(&self, xi: f64) -> Vec2 {
        match self {
            InitialCurve::Ellipse { a, b } => Vec2::new(a * xi.cos(), b * xi.sin()),
            InitialCurve::Circle { r } => Vec2::new(r * xi.cos(), r * xi.sin()),
            InitialCurve::Table(samples) => {
                let tau = std::f64::consts::TAU;
                let x = xi.rem_euclid(tau);
                // last sample wraps around to the first
                let idx = samples.partition_point(|s| s.0 <= x);
                let (x0, v0) = samples[if idx == 0 { samples.len() - 1 } else { idx - 1 }];
                let (x1, v1) = samples[idx % samples.len()];
                if x == x0 {
                    return v0;
                }
                let gap = (x1 - x0).rem_euclid(tau);
                let t = (x - x0).rem_euclid(tau) / gap;
                v0 + (v1 - v0) * t
            }
        }
    }

    /// Parse a CLI descriptor: `ellipse:a,b`, `circle:r` or `file:PATH`.
    pub fn from_descriptor(s: &str) -> Result<InitialCurve> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::ParseCurve(format!("missing ':' in descriptor {s:?}")))?;
        match kind {
            "ellipse" => {
                let (a, b) = arg
                    .split_once(',')
                    .ok_or_else(|| Error::ParseCurve(format!("ellipse needs a,b in {s:?}")))?;
                let a: f64 =
                    a.trim().parse().map_err(|e| Error::ParseCurve(format!("{s:?}: {e}")))?;
                let b: f64 =
                    b.trim().parse().map_err(|e| Error::ParseCurve(format!("{s:?}: {e}")))?;
                InitialCurve::ellipse(a, b)
            }
            "circle" => {
                let r: f64 =
                    arg.trim().parse().map_err(|e| Error::ParseCurve(format!("{s:?}: {e}")))?;
                InitialCurve::circle(r)
            }
            "file" => InitialCurve::from_polygon_file(arg),
            other => Err(Error::ParseCurve(format!("unknown curve kind {other:?}"))),
        }
    }
}

impl FromStr for InitialCurve {
    type Err = Error;
    fn from_str(s: &str) -> Result<InitialCurve> {
        InitialCurve::from_descriptor(s)
    }
}

impl fmt::Display for InitialCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialCurve::Ellipse { a, b } => write!(f, "ellipse:{a},{b}"),
            InitialCurve::Circle { r } => write!(f, "circle:{r}"),
            InitialCurve::Table(samples) => write!(f, "table:{} points", samples.len()),
        }
    }
}

/// The uniform partition of `[0, 2*pi]` into `n` intervals.
pub fn uniform_grid(n: usize) -> Result<Grid> {
    Grid::uniform(n)
}

/// Nodal interpolant of `curve` on `grid`: vertex `j` equals the curve value
/// at node `xi_j` exactly.
pub fn interpolate(curve: &InitialCurve, grid: &Grid) -> Result<PolygonCurve> {
    let vertices: Vec<Vec2> = (0..grid.n()).map(|j| curve.eval(grid.node(j))).collect();
    PolygonCurve::new(vertices)
}
