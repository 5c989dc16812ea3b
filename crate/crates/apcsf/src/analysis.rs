//! Refinement studies and structure audits over recorded trajectories.
//!
//! Errors are measured against the next refinement level (half the mesh,
//! a quarter of the time step) rather than an exact solution:
//!
//! * `E1`: max over steps of the L2 distance between paired snapshots,
//! * `E2`: max over steps of the H1 seminorm distance,
//! * `E3`: the time-integrated L2 distance of the discrete velocities.
//!
//! Convergence orders are `log2` ratios between consecutive levels.
//!
//! The error functionals are reported in the unit-parameter chart: the
//! periodic parameter is rescaled from `[0, 2*pi]` to `[0, 1]` before
//! integrating, so `E1` and `E3` carry a factor `1/sqrt(2*pi)` and the
//! seminorm `E2` a factor `sqrt(2*pi)` relative to the raw-parameter
//! distances of [`crate::norms`]. The matching step-size convention is
//! `tau = h^2 / 2` with `h = 1/N` ([`TauRule::Auto`]), under which the
//! step count `T/tau = 2 T N^2` is an exact integer for the standard
//! `T = 1/4` runs. This is the convention of the reference error table
//! that the convergence study reproduces.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::fulldiscrete;
use crate::geometry::Grid;
use crate::init::{interpolate, uniform_grid, InitialCurve};
use crate::norms::{h1_seminorm_distance, l2_distance, PlFunction};
use crate::trajectory::TrajectoryRecord;
use crate::vec2::Vec2;

/// Per-step slack, relative to the initial perimeter, tolerated by the
/// perimeter-monotonicity audit; covers integrator roundoff only.
pub const PERIMETER_SLACK_REL: f64 = 1e-10;

/// How the coarse-level time step is chosen for a refinement study.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TauRule {
    /// The parabolic choice `tau = h^2 / 2` in the unit-parameter chart
    /// (`h = 1/N`), rounded to an integer step count at the coarsest level;
    /// refinements quarter the step exactly.
    Auto,
    /// Explicit coarse-level step; the final time is adjusted to the nearest
    /// multiple (with a logged note) so the step count is an integer.
    Fixed(f64),
}

/// Resolved time stepping for a study: `m0` steps of `tau0` at the coarsest
/// level, quartered per refinement, all levels sharing `t_end`.
#[derive(Clone, Copy, Debug)]
pub struct StepPlan {
    pub t_end: f64,
    pub coarse_steps: usize,
    pub coarse_tau: f64,
}

impl StepPlan {
    pub fn resolve(rule: TauRule, n0: usize, t_end: f64) -> Result<StepPlan> {
        if !(t_end > 0.0) {
            return Err(Error::InvalidParameter(format!("t_end must be positive, got {t_end}")));
        }
        match rule {
            TauRule::Auto => {
                // tau = 0.5 (1/n)^2, i.e. m = 2 T n^2 (exact for T = 1/4)
                let m = (2.0 * t_end * (n0 * n0) as f64).round().max(1.0) as usize;
                Ok(StepPlan { t_end, coarse_steps: m, coarse_tau: t_end / m as f64 })
            }
            TauRule::Fixed(tau) => {
                if !(tau > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "tau must be positive, got {tau}"
                    )));
                }
                let m = (t_end / tau).round().max(1.0) as usize;
                let adjusted = m as f64 * tau;
                if (adjusted - t_end).abs() > 1e-12 * t_end {
                    log::info!(
                        "adjusted t_end from {t_end} to {adjusted} ({m} steps of tau={tau})"
                    );
                }
                Ok(StepPlan { t_end: adjusted, coarse_steps: m, coarse_tau: tau })
            }
        }
    }

    /// Steps and time step at refinement level `level` (0 = coarsest).
    pub fn at_level(&self, level: u32) -> (usize, f64) {
        let m = self.coarse_steps * 4usize.pow(level);
        (m, self.t_end / m as f64)
    }
}

fn uniform_grid_of(record: &TrajectoryRecord) -> Result<Grid> {
    uniform_grid(record.initial().n())
}

/// Validate the (4x steps, 2x grid) refinement pairing and return the number
/// of coarse steps.
fn check_refinement(coarse: &TrajectoryRecord, fine: &TrajectoryRecord) -> Result<usize> {
    if !coarse.records_every_step() || !fine.records_every_step() {
        return Err(Error::IncompatibleRefinement(
            "both trajectories must be recorded at every step".into(),
        ));
    }
    let m = coarse.total_steps;
    if fine.total_steps != 4 * m {
        return Err(Error::IncompatibleRefinement(format!(
            "expected 4x the steps, got {} vs {}",
            fine.total_steps, m
        )));
    }
    if fine.initial().n() != 2 * coarse.initial().n() {
        return Err(Error::IncompatibleRefinement(format!(
            "expected 2x the grid, got {} vs {}",
            fine.initial().n(),
            coarse.initial().n()
        )));
    }
    let dt_ok = coarse
        .times
        .iter()
        .enumerate()
        .all(|(k, &t)| (fine.times[4 * k] - t).abs() <= 1e-9 * t.max(1.0));
    if !dt_ok {
        return Err(Error::IncompatibleRefinement("step times do not align 4:1".into()));
    }
    Ok(m)
}

/// Max over steps of the L2 distance between coarse snapshot `k` and fine
/// snapshot `4k`, in the unit-parameter chart.
pub fn error_e1(coarse: &TrajectoryRecord, fine: &TrajectoryRecord) -> Result<f64> {
    let m = check_refinement(coarse, fine)?;
    let gc = uniform_grid_of(coarse)?;
    let gf = uniform_grid_of(fine)?;
    let mut worst = 0.0f64;
    for k in 1..=m {
        let f = PlFunction::new(&gc, coarse.snapshots[k].vertices());
        let g = PlFunction::new(&gf, fine.snapshots[4 * k].vertices());
        worst = worst.max(l2_distance(&f, &g));
    }
    Ok(worst / TAU.sqrt())
}

/// Max over steps of the H1 seminorm distance between paired snapshots, in
/// the unit-parameter chart.
pub fn error_e2(coarse: &TrajectoryRecord, fine: &TrajectoryRecord) -> Result<f64> {
    let m = check_refinement(coarse, fine)?;
    let gc = uniform_grid_of(coarse)?;
    let gf = uniform_grid_of(fine)?;
    let mut worst = 0.0f64;
    for k in 1..=m {
        let f = PlFunction::new(&gc, coarse.snapshots[k].vertices());
        let g = PlFunction::new(&gf, fine.snapshots[4 * k].vertices());
        worst = worst.max(h1_seminorm_distance(&f, &g));
    }
    // rescaling the parameter multiplies slopes by 2*pi and the measure by
    // 1/(2*pi); net factor sqrt(2*pi) on the seminorm
    Ok(worst * TAU.sqrt())
}

/// Time-integrated L2 distance of the discrete velocities,
/// `sqrt( sum_k tau || (X^{k+1}-X^k)/tau - (Y^{4k+1}-Y^{4k})/(tau/4) ||^2 )`,
/// in the unit-parameter chart.
pub fn error_e3(coarse: &TrajectoryRecord, fine: &TrajectoryRecord) -> Result<f64> {
    let m = check_refinement(coarse, fine)?;
    let gc = uniform_grid_of(coarse)?;
    let gf = uniform_grid_of(fine)?;
    let tau = coarse.times[1] - coarse.times[0];
    let tau_fine = fine.times[1] - fine.times[0];
    let mut acc = 0.0;
    for k in 0..m {
        let vc: Vec<Vec2> = coarse.snapshots[k + 1]
            .vertices()
            .iter()
            .zip(coarse.snapshots[k].vertices())
            .map(|(a, b)| (*a - *b) * (1.0 / tau))
            .collect();
        let vf: Vec<Vec2> = fine.snapshots[4 * k + 1]
            .vertices()
            .iter()
            .zip(fine.snapshots[4 * k].vertices())
            .map(|(a, b)| (*a - *b) * (1.0 / tau_fine))
            .collect();
        let f = PlFunction::new(&gc, &vc);
        let g = PlFunction::new(&gf, &vf);
        let d = l2_distance(&f, &g);
        acc += tau * d * d;
    }
    Ok((acc / TAU).sqrt())
}

/// One level of a convergence report.
#[derive(Clone, Copy, Debug)]
pub struct ReportRow {
    pub n: usize,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub order1: Option<f64>,
    pub order2: Option<f64>,
    pub order3: Option<f64>,
}

/// Errors and fitted orders per refinement level, plus the configuration the
/// study ran with.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
    pub curve: String,
    pub t_end: f64,
    pub tau_rule: String,
}

impl ConvergenceReport {
    /// CSV with header `N,E1,order1,E2,order2,E3,order3`; errors in three
    /// significant digits, empty order cells on the first level.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,E1,order1,E2,order2,E3,order3\n");
        for row in &self.rows {
            let ord = |o: Option<f64>| o.map(|v| format!("{v:.2}")).unwrap_or_default();
            out.push_str(&format!(
                "{},{:.2e},{},{:.2e},{},{:.2e},{}\n",
                row.n,
                row.e1,
                ord(row.order1),
                row.e2,
                ord(row.order2),
                row.e3,
                ord(row.order3),
            ));
        }
        out
    }
}

fn validate_doubling(n_list: &[usize]) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::InvalidParameter("need at least one grid size".into()));
    }
    if n_list[0] < 3 {
        return Err(Error::InvalidN(n_list[0]));
    }
    for w in n_list.windows(2) {
        if w[1] != 2 * w[0] {
            return Err(Error::InvalidParameter(format!(
                "grid sizes must double between levels, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

fn run_level(
    curve0: &InitialCurve,
    n: usize,
    t_end: f64,
    steps: usize,
) -> Result<TrajectoryRecord> {
    let grid = uniform_grid(n)?;
    let poly = interpolate(curve0, &grid)?;
    fulldiscrete::evolve_full(&poly, t_end, t_end / steps as f64, 1)
}

/// Run the implicit scheme on every level of `n_list` plus one extra
/// refinement as the reference, and tabulate `E1`..`E3` with orders between
/// consecutive levels.
pub fn run_convergence_study(
    curve0: &InitialCurve,
    n_list: &[usize],
    t_end: f64,
    rule: TauRule,
) -> Result<ConvergenceReport> {
    validate_doubling(n_list)?;
    let plan = StepPlan::resolve(rule, n_list[0], t_end)?;
    let mut runs: Vec<TrajectoryRecord> = Vec::with_capacity(n_list.len() + 1);
    for (level, &n) in n_list.iter().enumerate() {
        let (m, _) = plan.at_level(level as u32);
        runs.push(run_level(curve0, n, plan.t_end, m)?);
    }
    let (m_ref, _) = plan.at_level(n_list.len() as u32);
    runs.push(run_level(curve0, 2 * n_list[n_list.len() - 1], plan.t_end, m_ref)?);

    let mut rows: Vec<ReportRow> = Vec::with_capacity(n_list.len());
    for (level, &n) in n_list.iter().enumerate() {
        let e1 = error_e1(&runs[level], &runs[level + 1])?;
        let e2 = error_e2(&runs[level], &runs[level + 1])?;
        let e3 = error_e3(&runs[level], &runs[level + 1])?;
        let order = |prev: f64, cur: f64| {
            if prev > 0.0 && cur > 0.0 {
                Some((prev / cur).log2())
            } else {
                None
            }
        };
        let (order1, order2, order3) = match rows.last() {
            Some(prev) => (order(prev.e1, e1), order(prev.e2, e2), order(prev.e3, e3)),
            None => (None, None, None),
        };
        rows.push(ReportRow { n, e1, e2, e3, order1, order2, order3 });
    }
    Ok(ConvergenceReport {
        rows,
        curve: curve0.to_string(),
        t_end: plan.t_end,
        tau_rule: match rule {
            TauRule::Auto => "auto".into(),
            TauRule::Fixed(tau) => format!("{tau}"),
        },
    })
}

/// Structure-preservation summary of a recorded trajectory.
#[derive(Clone, Copy, Debug)]
pub struct StructureAudit {
    /// Every recorded perimeter is at most the previous one plus
    /// `PERIMETER_SLACK_REL` times the initial perimeter.
    pub perimeter_monotone: bool,
    /// Largest single-step perimeter increase observed (0 when monotone).
    pub max_perimeter_increase: f64,
    /// Smallest oriented fan area over the whole run.
    pub min_fan_area: f64,
    /// Shortest edge over the whole run.
    pub min_edge: f64,
    /// `|area(end) - area(start)|`.
    pub area_drift: f64,
}

/// Audit a trajectory from its recorded diagnostics, without re-simulation.
pub fn audit_structure(traj: &TrajectoryRecord) -> StructureAudit {
    assert!(!traj.is_empty(), "cannot audit an empty trajectory");
    let l0 = traj.diagnostics[0].perimeter;
    let mut monotone = true;
    let mut max_increase = 0.0f64;
    for w in traj.diagnostics.windows(2) {
        let inc = w[1].perimeter - w[0].perimeter;
        max_increase = max_increase.max(inc);
        if inc > PERIMETER_SLACK_REL * l0 {
            monotone = false;
        }
    }
    StructureAudit {
        perimeter_monotone: monotone,
        max_perimeter_increase: max_increase.max(0.0),
        min_fan_area: traj.diagnostics.iter().map(|d| d.min_fan_area).fold(f64::INFINITY, f64::min),
        min_edge: traj.diagnostics.iter().map(|d| d.min_edge).fold(f64::INFINITY, f64::min),
        area_drift: (traj.diagnostics.last().unwrap().area - traj.diagnostics[0].area).abs(),
    }
}

/// Area drift per refinement level.
#[derive(Clone, Debug)]
pub struct AreaLossReport {
    /// `(n, |area(t_end) - area(0)|)` per level.
    pub rows: Vec<(usize, f64)>,
    pub curve: String,
    pub t_end: f64,
}

impl AreaLossReport {
    /// Least-squares slope of `log(drift)` against `log(h)`; `None` with
    /// fewer than two usable levels.
    pub fn slope(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|(_, d)| *d > 0.0)
            .map(|(n, d)| ((TAU / *n as f64).ln(), d.ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let nf = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        Some(sxy / sxx)
    }

    /// Drift ratios between consecutive levels.
    pub fn ratios(&self) -> Vec<f64> {
        self.rows.windows(2).map(|w| w[0].1 / w[1].1).collect()
    }
}

/// One implicit run per level; report the enclosed-area drift at `t_end` and
/// its scaling.
pub fn area_loss_study(
    curve0: &InitialCurve,
    n_list: &[usize],
    t_end: f64,
    rule: TauRule,
) -> Result<AreaLossReport> {
    validate_doubling(n_list)?;
    let plan = StepPlan::resolve(rule, n_list[0], t_end)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for (level, &n) in n_list.iter().enumerate() {
        let (m, _) = plan.at_level(level as u32);
        let traj = run_level(curve0, n, plan.t_end, m)?;
        rows.push((n, audit_structure(&traj).area_drift));
    }
    Ok(AreaLossReport { rows, curve: curve0.to_string(), t_end: plan.t_end })
}
