//! Periodic parameter grids and closed polygon primitives.
//!
//! A [`PolygonCurve`] is the discrete state of every scheme in this crate:
//! an anticlockwise list of vertices with periodic indexing. All derived
//! quantities (edge lengths, unit tangents, inner normals, perimeter,
//! oriented triangle areas, exterior angles) are collected in
//! [`GeometricState`]. A [`Grid`] is a partition of the parameter circle
//! `[xi_0, xi_0 + 2*pi]`; vertex `j` of a polygon sits at grid node `xi_j`
//! when the polygon is read as a piecewise linear map of the circle.

use std::f64::consts::TAU;
use std::path::Path;

use crate::error::{Error, Result};
use crate::vec2::Vec2;

/// Relative edge-degeneracy floor: an edge counts as collapsed when shorter
/// than this fraction of the mean edge length `perimeter / n`.
pub const DEFAULT_EDGE_FLOOR_REL: f64 = 1e-14;

/// Oriented area of the triangle `(y1, y2, y3)`.
///
/// Positive when the triple turns left, zero iff collinear, and antisymmetric
/// under swapping `y1` and `y3`.
#[inline]
pub fn oriented_area(y1: Vec2, y2: Vec2, y3: Vec2) -> f64 {
    0.5 * (y3 - y2).dot((y2 - y1).perp())
}

/// A partition `xi_0 < xi_1 < ... < xi_n = xi_0 + 2*pi` of the parameter
/// circle. Interval `i` spans `[xi_i, xi_{i+1}]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
}

impl Grid {
    /// Build a grid from its `n + 1` node values. The nodes must be strictly
    /// increasing and span `2*pi` to within `1e-12`.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Grid> {
        if nodes.len() < 2 {
            return Err(Error::InvalidParameter("grid needs at least one interval".into()));
        }
        for w in nodes.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParameter(format!(
                    "grid nodes must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let span = nodes[nodes.len() - 1] - nodes[0];
        if (span - TAU).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("grid must span 2*pi, got {span}")));
        }
        Ok(Grid { nodes })
    }

    /// The uniform partition of `[0, 2*pi]` into `n >= 3` intervals.
    pub fn uniform(n: usize) -> Result<Grid> {
        if n < 3 {
            return Err(Error::InvalidN(n));
        }
        let h = TAU / n as f64;
        let mut nodes: Vec<f64> = (0..=n).map(|j| j as f64 * h).collect();
        nodes[n] = TAU;
        Grid::from_nodes(nodes)
    }

    /// Number of intervals.
    pub fn n(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    /// Length of interval `i`.
    #[inline]
    pub fn interval(&self, i: usize) -> f64 {
        self.nodes[i + 1] - self.nodes[i]
    }

    pub fn max_interval(&self) -> f64 {
        (0..self.n()).map(|i| self.interval(i)).fold(0.0, f64::max)
    }

    pub fn min_interval(&self) -> f64 {
        (0..self.n()).map(|i| self.interval(i)).fold(f64::INFINITY, f64::min)
    }

    /// Mesh-regularity audit: the constants achieved by this partition.
    pub fn regularity(&self) -> GridRegularity {
        let n = self.n();
        let h_max = self.max_interval();
        let h_min = self.min_interval();
        let mut max_jump = 0.0f64;
        for i in 0..n {
            // periodic neighbour: interval after the last is the first
            let next = self.interval((i + 1) % n);
            max_jump = max_jump.max((next - self.interval(i)).abs());
        }
        GridRegularity { h_max, h_min, max_jump }
    }
}

/// Achieved mesh-regularity constants of a grid: the largest lower bound on
/// `h_min / h_max` and the adjacent-interval jump measured in units of
/// `h_max^2`, both including the periodic wrap pair.
#[derive(Clone, Copy, Debug)]
pub struct GridRegularity {
    pub h_max: f64,
    pub h_min: f64,
    pub max_jump: f64,
}

impl GridRegularity {
    /// Achieved lower ratio `h_min / h_max`.
    pub fn lower_ratio(&self) -> f64 {
        self.h_min / self.h_max
    }

    /// Achieved jump constant `max |h_{i+1} - h_i| / h_max^2`.
    pub fn jump_ratio(&self) -> f64 {
        self.max_jump / (self.h_max * self.h_max)
    }

    /// Whether the partition satisfies `h_min >= c_lower * h_max` and
    /// `|h_{i+1} - h_i| <= c_jump * h_max^2`, with `1e-12 * h_max` slack for
    /// node roundoff.
    pub fn satisfies(&self, c_lower: f64, c_jump: f64) -> bool {
        let slack = 1e-12 * self.h_max;
        self.h_min + slack >= c_lower * self.h_max
            && self.max_jump <= c_jump * self.h_max * self.h_max + slack
    }
}

/// Convexity verdict of an `n`-polygon, with a witness vertex.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Convexity {
    /// Every fan triangle has positive oriented area.
    Convex { min_fan_area: f64, argmin: usize },
    /// Some fan triangle has negative oriented area.
    NotConvex { index: usize, fan_area: f64 },
    /// Three adjacent vertices are exactly collinear, so the vertex list does
    /// not describe an `n`-sided polygon.
    NotAPolygon { index: usize },
}

impl Convexity {
    pub fn is_convex(&self) -> bool {
        matches!(self, Convexity::Convex { .. })
    }
}

/// A closed polygon with anticlockwise orientation and periodic indexing.
///
/// Construction enforces `n >= 3`, strictly positive edge lengths and a
/// positive shoelace area; a clockwise vertex list is reversed with a logged
/// warning. Values are immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonCurve {
    vertices: Vec<Vec2>,
}

impl PolygonCurve {
    pub fn new(vertices: Vec<Vec2>) -> Result<PolygonCurve> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidN(n));
        }
        for j in 0..n {
            let q = (vertices[j] - vertices[(j + n - 1) % n]).norm();
            if q == 0.0 {
                return Err(Error::DegenerateEdge { index: j, length: q, time: None });
            }
        }
        let area = shoelace(&vertices);
        if area == 0.0 {
            return Err(Error::ZeroArea);
        }
        let vertices = if area < 0.0 {
            log::warn!("clockwise polygon reversed to anticlockwise orientation");
            let mut v = vertices;
            v.reverse();
            v
        } else {
            vertices
        };
        Ok(PolygonCurve { vertices })
    }

    /// Internal constructor for states produced by the flows themselves,
    /// where orientation is inherited and degeneracy is guarded separately.
    pub(crate) fn from_vertices_unchecked(vertices: Vec<Vec2>) -> PolygonCurve {
        PolygonCurve { vertices }
    }

    /// Read a polygon from a plain text file: one vertex per line as two
    /// whitespace-separated decimal numbers, `#` starting a comment line,
    /// vertices in order with the first vertex not repeated at the end.
    pub fn from_file(path: impl AsRef<Path>) -> Result<PolygonCurve> {
        let text = std::fs::read_to_string(path)?;
        let mut vertices = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 {
                return Err(Error::ParseCurve(format!(
                    "line {}: expected two numbers, got {:?}",
                    lineno + 1,
                    line
                )));
            }
            let x: f64 = fields[0]
                .parse()
                .map_err(|e| Error::ParseCurve(format!("line {}: {e}", lineno + 1)))?;
            let y: f64 = fields[1]
                .parse()
                .map_err(|e| Error::ParseCurve(format!("line {}: {e}", lineno + 1)))?;
            vertices.push(Vec2::new(x, y));
        }
        PolygonCurve::new(vertices)
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    /// Vertex with periodic index.
    #[inline]
    pub fn vertex(&self, j: usize) -> Vec2 {
        self.vertices[j % self.vertices.len()]
    }

    /// Shoelace (signed, anticlockwise-positive) enclosed area. Assumes a
    /// simple polygon; self-intersection is not checked.
    pub fn shoelace_area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    pub fn min_edge(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|j| (self.vertices[j] - self.vertices[(j + n - 1) % n]).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Oriented areas `S_j` of the fan triangles `(X_{j-1}, X_j, X_{j+1})`.
    pub fn fan_areas(&self) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|j| {
                oriented_area(
                    self.vertices[(j + n - 1) % n],
                    self.vertices[j],
                    self.vertices[(j + 1) % n],
                )
            })
            .collect()
    }

    /// Oriented area of the extended fan triangle `(X_{j-1}, X_j, X_k)`;
    /// `k` must differ from `j-1` and `j` modulo `n`.
    pub fn extended_fan_area(&self, j: usize, k: usize) -> Result<f64> {
        let n = self.n();
        let (j, k) = (j % n, k % n);
        if k == j || k == (j + n - 1) % n {
            return Err(Error::InvalidIndex { j, k });
        }
        Ok(oriented_area(self.vertices[(j + n - 1) % n], self.vertices[j], self.vertices[k]))
    }

    /// Convexity test via the sign of the fan areas, with a witness.
    ///
    /// An exactly zero fan area means three adjacent vertices are collinear,
    /// reported as [`Convexity::NotAPolygon`] rather than an error.
    pub fn convexity(&self) -> Convexity {
        let areas = self.fan_areas();
        for (j, &s) in areas.iter().enumerate() {
            if s == 0.0 {
                return Convexity::NotAPolygon { index: j };
            }
        }
        let (argmin, &min) =
            areas.iter().enumerate().min_by(|a, b| a.1.partial_cmp(b.1).unwrap()).unwrap();
        if min < 0.0 {
            Convexity::NotConvex { index: argmin, fan_area: min }
        } else {
            Convexity::Convex { min_fan_area: min, argmin }
        }
    }

    /// All derived geometric quantities, with the default degeneracy floor.
    pub fn geometric_state(&self) -> Result<GeometricState> {
        GeometricState::compute(self.vertices(), DEFAULT_EDGE_FLOOR_REL)
    }

    /// As [`geometric_state`](Self::geometric_state) with a caller-supplied
    /// relative edge floor.
    pub fn geometric_state_with_floor(&self, floor_rel: f64) -> Result<GeometricState> {
        GeometricState::compute(self.vertices(), floor_rel)
    }
}

fn shoelace(vertices: &[Vec2]) -> f64 {
    let n = vertices.len();
    let mut acc = 0.0;
    for j in 0..n {
        acc += vertices[j].cross(vertices[(j + 1) % n]);
    }
    0.5 * acc
}

/// Derived quantities of a polygon: edge lengths `q_j = |X_j - X_{j-1}|`,
/// unit tangents, inner normals (tangent rotated by +90 degrees), perimeter,
/// fan areas and exterior angles.
///
/// Edge `j` is the edge arriving at vertex `j`; all arrays are indexed by
/// vertex with periodic wraparound.
#[derive(Clone, Debug)]
pub struct GeometricState {
    pub edge_lengths: Vec<f64>,
    pub tangents: Vec<Vec2>,
    pub normals: Vec<Vec2>,
    pub perimeter: f64,
    pub fan_areas: Vec<f64>,
    pub exterior_angles: Vec<f64>,
}

impl GeometricState {
    pub(crate) fn compute(vertices: &[Vec2], floor_rel: f64) -> Result<GeometricState> {
        let n = vertices.len();
        let mut edge_lengths = Vec::with_capacity(n);
        for j in 0..n {
            let q = (vertices[j] - vertices[(j + n - 1) % n]).norm();
            if q == 0.0 {
                return Err(Error::DegenerateEdge { index: j, length: q, time: None });
            }
            edge_lengths.push(q);
        }
        let perimeter: f64 = edge_lengths.iter().sum();
        let floor = floor_rel * perimeter / n as f64;
        if let Some(j) = (0..n).find(|&j| edge_lengths[j] < floor) {
            return Err(Error::DegenerateEdge { index: j, length: edge_lengths[j], time: None });
        }
        let tangents: Vec<Vec2> =
            (0..n).map(|j| (vertices[j] - vertices[(j + n - 1) % n]) / edge_lengths[j]).collect();
        let normals: Vec<Vec2> = tangents.iter().map(|t| t.perp()).collect();
        let fan_areas: Vec<f64> = (0..n)
            .map(|j| oriented_area(vertices[(j + n - 1) % n], vertices[j], vertices[(j + 1) % n]))
            .collect();
        // signed turning angle at vertex j, between the arriving and leaving
        // tangents; atan2 keeps the sign and is stable near 0 and pi
        let exterior_angles: Vec<f64> = (0..n)
            .map(|j| {
                let t0 = tangents[j];
                let t1 = tangents[(j + 1) % n];
                f64::atan2(t0.cross(t1), t0.dot(t1))
            })
            .collect();
        Ok(GeometricState {
            edge_lengths,
            tangents,
            normals,
            perimeter,
            fan_areas,
            exterior_angles,
        })
    }

    pub fn n(&self) -> usize {
        self.edge_lengths.len()
    }

    pub fn min_edge(&self) -> f64 {
        self.edge_lengths.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn min_fan_area(&self) -> f64 {
        self.fan_areas.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Regular n-gon with circumradius `r` centred at the origin, anticlockwise.
pub fn regular_polygon(n: usize, r: f64) -> Result<PolygonCurve> {
    if n < 3 {
        return Err(Error::InvalidN(n));
    }
    let vertices = (0..n)
        .map(|j| {
            let phi = TAU * j as f64 / n as f64;
            Vec2::new(r * phi.cos(), r * phi.sin())
        })
        .collect();
    PolygonCurve::new(vertices)
}

/// Anticlockwise unit square `(0,0), (1,0), (1,1), (0,1)`.
#[cfg(test)]
pub(crate) fn unit_square() -> PolygonCurve {
    PolygonCurve::new(vec![
        Vec2::new(0.0, 0.0),
        Vec2::new(1.0, 0.0),
        Vec2::new(1.0, 1.0),
        Vec2::new(0.0, 1.0),
    ])
    .unwrap()
}
