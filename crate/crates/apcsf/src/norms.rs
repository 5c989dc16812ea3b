//! Exact L2 and H1 distances between periodic piecewise linear functions on
//! possibly different grids.
//!
//! The difference of two such functions is piecewise linear on the union of
//! the two node sets, so its squared norm integrates exactly by the closed
//! form for quadratics; no numerical quadrature is involved.

use crate::geometry::Grid;
use crate::vec2::Vec2;

/// Node coincidence tolerance when merging two grids. Nested refinement
/// produces exactly coincident nodes in binary floating point; this absorbs
/// last-ulp differences from independently computed partitions.
pub const NODE_MERGE_TOL: f64 = 1e-14;

/// A periodic piecewise linear function on a grid: `values[j]` at node
/// `xi_j`, wrapping back to `values[0]` at the last node.
#[derive(Clone, Copy, Debug)]
pub struct PlFunction<'a> {
    grid: &'a Grid,
    values: &'a [Vec2],
}

impl<'a> PlFunction<'a> {
    /// `values.len()` must equal the number of grid intervals.
    pub fn new(grid: &'a Grid, values: &'a [Vec2]) -> PlFunction<'a> {
        assert_eq!(grid.n(), values.len(), "one value per grid node");
        PlFunction { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        self.grid
    }

    /// Value at the right end of interval `i` (periodic).
    #[inline]
    fn right(&self, i: usize) -> Vec2 {
        self.values[(i + 1) % self.values.len()]
    }

    /// Value at parameter `xi`, which must lie inside interval `i`.
    #[inline]
    fn eval_in(&self, i: usize, xi: f64) -> Vec2 {
        let a = self.grid.node(i);
        let t = (xi - a) / self.grid.interval(i);
        self.values[i] + (self.right(i) - self.values[i]) * t
    }

    /// Derivative (in parameter) on interval `i`.
    #[inline]
    fn slope(&self, i: usize) -> Vec2 {
        (self.right(i) - self.values[i]) * (1.0 / self.grid.interval(i))
    }

    /// Value at an arbitrary parameter in the grid's span.
    pub fn eval(&self, xi: f64) -> Vec2 {
        let nodes = self.grid.nodes();
        let i = match nodes.binary_search_by(|n| n.total_cmp(&xi)) {
            Ok(i) => i.min(self.grid.n() - 1),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.grid.n() - 1),
        };
        self.eval_in(i, xi)
    }
}

/// Merged node list of two grids sharing the same span, deduplicated with
/// [`NODE_MERGE_TOL`].
fn union_nodes(a: &Grid, b: &Grid) -> Vec<f64> {
    debug_assert!((a.node(0) - b.node(0)).abs() <= 1e-12, "grids must share their span");
    let (na, nb) = (a.nodes(), b.nodes());
    let mut out: Vec<f64> = Vec::with_capacity(na.len() + nb.len());
    let (mut i, mut j) = (0, 0);
    while i < na.len() || j < nb.len() {
        let next = match (na.get(i), nb.get(j)) {
            (Some(&x), Some(&y)) => {
                if (x - y).abs() <= NODE_MERGE_TOL {
                    i += 1;
                    j += 1;
                    x.min(y)
                } else if x < y {
                    i += 1;
                    x
                } else {
                    j += 1;
                    y
                }
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        match out.last() {
            Some(&last) if (next - last).abs() <= NODE_MERGE_TOL => {}
            _ => out.push(next),
        }
    }
    out
}

/// Sweep the union mesh, accumulating a per-interval contribution.
fn union_sweep<F>(f: &PlFunction, g: &PlFunction, mut per_interval: F)
where
    F: FnMut(&PlFunction, &PlFunction, usize, usize, f64, f64),
{
    let nodes = union_nodes(f.grid, g.grid);
    let mut fi = 0usize;
    let mut gi = 0usize;
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = 0.5 * (a + b);
        while fi + 1 < f.grid.n() && f.grid.node(fi + 1) <= mid {
            fi += 1;
        }
        while gi + 1 < g.grid.n() && g.grid.node(gi + 1) <= mid {
            gi += 1;
        }
        per_interval(f, g, fi, gi, a, b);
    }
}

/// Exact `L2` norm of `f - g` over the shared periodic span.
pub fn l2_distance(f: &PlFunction, g: &PlFunction) -> f64 {
    let mut acc = 0.0;
    union_sweep(f, g, |f, g, fi, gi, a, b| {
        let da = f.eval_in(fi, a) - g.eval_in(gi, a);
        let db = f.eval_in(fi, b) - g.eval_in(gi, b);
        // integral of the quadratic |d|^2 over [a, b]
        acc += (b - a) / 3.0 * (da.norm_sq() + da.dot(db) + db.norm_sq());
    });
    acc.sqrt()
}

/// Exact `H1` seminorm of `f - g`: the `L2` norm of the difference of the
/// piecewise constant parameter derivatives.
pub fn h1_seminorm_distance(f: &PlFunction, g: &PlFunction) -> f64 {
    let mut acc = 0.0;
    union_sweep(f, g, |f, g, fi, gi, a, b| {
        let d = f.slope(fi) - g.slope(gi);
        acc += (b - a) * d.norm_sq();
    });
    acc.sqrt()
}
