//! Time-stamped snapshots of an evolving polygon, with per-step diagnostics.

use crate::error::Result;
use crate::geometry::PolygonCurve;
use crate::semidiscrete;

/// Scalar diagnostics of one recorded state.
#[derive(Clone, Copy, Debug)]
pub struct StepDiagnostics {
    /// Perimeter of the polygon.
    pub perimeter: f64,
    /// Shoelace enclosed area.
    pub area: f64,
    /// Shortest edge.
    pub min_edge: f64,
    /// Smallest oriented fan-triangle area (positive iff convex).
    pub min_fan_area: f64,
    /// Largest vertex speed of the lumped-mass velocity at this state.
    pub max_speed: f64,
}

impl StepDiagnostics {
    pub fn compute(curve: &PolygonCurve) -> Result<StepDiagnostics> {
        let gs = curve.geometric_state()?;
        let field = semidiscrete::rhs(curve)?;
        let max_speed = field.velocity.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Ok(StepDiagnostics {
            perimeter: gs.perimeter,
            area: curve.shoelace_area(),
            min_edge: gs.min_edge(),
            min_fan_area: gs.min_fan_area(),
            max_speed,
        })
    }
}

/// A recorded trajectory: strictly increasing times, one polygon snapshot and
/// one diagnostics row per recorded step.
#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub snapshots: Vec<PolygonCurve>,
    pub diagnostics: Vec<StepDiagnostics>,
    /// Recording stride used to produce this trajectory.
    pub record_every: usize,
    /// Total number of time steps taken (recorded or not).
    pub total_steps: usize,
}

impl TrajectoryRecord {
    pub(crate) fn new(record_every: usize) -> TrajectoryRecord {
        TrajectoryRecord {
            times: Vec::new(),
            snapshots: Vec::new(),
            diagnostics: Vec::new(),
            record_every,
            total_steps: 0,
        }
    }

    pub(crate) fn push(&mut self, t: f64, curve: PolygonCurve) -> Result<()> {
        debug_assert!(self.times.last().is_none_or(|&last| t > last));
        debug_assert!(self.snapshots.first().is_none_or(|c| c.n() == curve.n()));
        self.diagnostics.push(StepDiagnostics::compute(&curve)?);
        self.times.push(t);
        self.snapshots.push(curve);
        Ok(())
    }

    /// Number of recorded states.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn initial(&self) -> &PolygonCurve {
        &self.snapshots[0]
    }

    pub fn final_curve(&self) -> &PolygonCurve {
        self.snapshots.last().expect("trajectory has at least the initial state")
    }

    /// Whether every time step was recorded.
    pub fn records_every_step(&self) -> bool {
        self.record_every == 1 && self.len() == self.total_steps + 1
    }
}
