//! The linearly implicit fully discrete scheme: one cyclic block tridiagonal
//! solve per time step, with all geometry coefficients frozen at the previous
//! step.
//!
//! Vertex `j` of the new state solves
//!
//! ```text
//! (q_j + q_{j+1})/(2 tau) (X_j^k - X_j^{k-1})
//!   - (X_{j+1}^k - X_j^k)/q_{j+1} + (X_j^k - X_{j-1}^k)/q_j
//!   + (pi / L) (X_{j+1}^k - X_{j-1}^k)^perp = 0
//! ```
//!
//! with `q` and `L` taken from step `k-1`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::PolygonCurve;
use crate::linsolve::{self, DEFAULT_CONDITION_CAP};
use crate::trajectory::TrajectoryRecord;
use crate::vec2::{Mat2, Vec2};

/// Block rows `diag[j] x_j + upper[j] x_{j+1} + lower[j] x_{j-1} = rhs[j]`
/// with periodic indices; `lower[0]` and `upper[n-1]` are the corner blocks.
#[derive(Clone, Debug)]
pub struct CyclicBlockTridiagonalSystem {
    pub diag: Vec<Mat2>,
    pub upper: Vec<Mat2>,
    pub lower: Vec<Mat2>,
    pub rhs: Vec<Vec2>,
}

impl CyclicBlockTridiagonalSystem {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Apply the system matrix to a vertex field.
    pub fn apply(&self, x: &[Vec2]) -> Vec<Vec2> {
        let n = self.n();
        (0..n)
            .map(|j| {
                self.diag[j] * x[j]
                    + self.upper[j] * x[(j + 1) % n]
                    + self.lower[j] * x[(j + n - 1) % n]
            })
            .collect()
    }

    /// Solve the system: dense elimination for small `n`, banded elimination
    /// with a corner correction otherwise.
    ///
    /// The condition cap guards the pivot blocks of the banded path; the
    /// dense path pivots row-wise and fails only on numerically singular
    /// matrices.
    pub fn solve(&self) -> Result<Vec<Vec2>> {
        self.solve_with_cap(DEFAULT_CONDITION_CAP)
    }

    pub fn solve_with_cap(&self, condition_cap: f64) -> Result<Vec<Vec2>> {
        if self.n() <= 16 {
            linsolve::solve_dense(self, condition_cap)
        } else {
            linsolve::solve_banded(self, condition_cap)
        }
    }

    /// The O(n) banded path regardless of size.
    pub fn solve_banded(&self) -> Result<Vec<Vec2>> {
        linsolve::solve_banded(self, DEFAULT_CONDITION_CAP)
    }

    /// The dense reference path regardless of size.
    pub fn solve_dense(&self) -> Result<Vec<Vec2>> {
        linsolve::solve_dense(self, DEFAULT_CONDITION_CAP)
    }
}

/// Assemble the implicit step system from the previous state.
pub fn assemble(curve_prev: &PolygonCurve, tau: f64) -> Result<CyclicBlockTridiagonalSystem> {
    assemble_guarded(curve_prev, tau, crate::geometry::DEFAULT_EDGE_FLOOR_REL)
}

fn assemble_guarded(
    curve_prev: &PolygonCurve,
    tau: f64,
    edge_floor_rel: f64,
) -> Result<CyclicBlockTridiagonalSystem> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    let gs = curve_prev.geometric_state_with_floor(edge_floor_rel)?;
    let n = gs.n();
    let q = &gs.edge_lengths;
    let p = PI / gs.perimeter;
    let mut diag = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for j in 0..n {
        let jp = (j + 1) % n;
        let mass = (q[j] + q[jp]) / (2.0 * tau);
        diag.push(Mat2::scaled_identity(mass + 1.0 / q[j] + 1.0 / q[jp]));
        upper.push(Mat2::scaled_identity(-1.0 / q[jp]) + Mat2::PERP * p);
        lower.push(Mat2::scaled_identity(-1.0 / q[j]) - Mat2::PERP * p);
        rhs.push(curve_prev.vertices()[j] * mass);
    }
    Ok(CyclicBlockTridiagonalSystem { diag, upper, lower, rhs })
}

/// One implicit time step.
pub fn step(curve_prev: &PolygonCurve, tau: f64) -> Result<PolygonCurve> {
    step_guarded(curve_prev, tau, crate::geometry::DEFAULT_EDGE_FLOOR_REL, DEFAULT_CONDITION_CAP)
}

pub fn step_guarded(
    curve_prev: &PolygonCurve,
    tau: f64,
    edge_floor_rel: f64,
    condition_cap: f64,
) -> Result<PolygonCurve> {
    let system = assemble_guarded(curve_prev, tau, edge_floor_rel)?;
    let vertices = system.solve_with_cap(condition_cap)?;
    Ok(PolygonCurve::from_vertices_unchecked(vertices))
}

/// March `t_end / tau` implicit steps, recording every `record_every`-th step
/// plus the initial and final states. `t_end` must be an integer multiple of
/// `tau` (to relative precision `1e-9`).
pub fn evolve_full(
    curve0: &PolygonCurve,
    t_end: f64,
    tau: f64,
    record_every: usize,
) -> Result<TrajectoryRecord> {
    evolve_full_guarded(
        curve0,
        t_end,
        tau,
        record_every,
        crate::geometry::DEFAULT_EDGE_FLOOR_REL,
        DEFAULT_CONDITION_CAP,
    )
}

pub fn evolve_full_guarded(
    curve0: &PolygonCurve,
    t_end: f64,
    tau: f64,
    record_every: usize,
    edge_floor_rel: f64,
    condition_cap: f64,
) -> Result<TrajectoryRecord> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {tau}")));
    }
    if record_every == 0 {
        return Err(Error::InvalidParameter("record_every must be at least 1".into()));
    }
    let ratio = t_end / tau;
    let steps = ratio.round();
    if steps < 1.0 || (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "t_end/tau must be a positive integer number of steps, got {ratio}"
        )));
    }
    let steps = steps as usize;
    let mut record = TrajectoryRecord::new(record_every);
    record.total_steps = steps;
    record.push(0.0, curve0.clone())?;
    let mut state = curve0.clone();
    for k in 1..=steps {
        let t = k as f64 * tau;
        state =
            step_guarded(&state, tau, edge_floor_rel, condition_cap).map_err(|e| e.at_time(t))?;
        if k % record_every == 0 || k == steps {
            record.push(t, state.clone()).map_err(|e| e.at_time(t))?;
        }
    }
    Ok(record)
}
