//! Parametric finite element solver for the area-preserving curve shortening
//! flow of closed planar curves.
//!
//! A curve is discretized as a polygon whose vertices move by discrete
//! curvature minus the average curvature `2 pi / L`. Two schemes are
//! provided: the semidiscrete vertex ODE integrated by Runge-Kutta
//! ([`semidiscrete`]), and a linearly implicit stepper solving one cyclic
//! block tridiagonal system per step ([`fulldiscrete`]). The flow shrinks
//! the perimeter while keeping the enclosed area nearly constant, and an
//! initially convex polygon stays convex; [`analysis`] audits both
//! properties on recorded trajectories and measures refinement convergence.
//!
//! ```
//! use apcsf::init::{interpolate, uniform_grid, InitialCurve};
//!
//! let grid = uniform_grid(32)?;
//! let polygon = interpolate(&InitialCurve::ellipse(2.0, 1.0)?, &grid)?;
//! let run = apcsf::fulldiscrete::evolve_full(&polygon, 0.25, 0.0025, 1)?;
//! let audit = apcsf::analysis::audit_structure(&run);
//! assert!(audit.perimeter_monotone);
//! assert!(audit.min_fan_area > 0.0); // stayed convex
//! # Ok::<(), apcsf::Error>(())
//! ```

// index loops mirror the periodic wraparound arithmetic of the formulas;
// negated comparisons like `!(x > 0.0)` deliberately reject NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod fulldiscrete;
pub mod geometry;
pub mod init;
mod linsolve;
pub mod norms;
pub mod sampling;
pub mod semidiscrete;
pub mod trajectory;
pub mod vec2;
pub mod weakform;

#[cfg(doctest)]
mod book;

pub use error::{Error, Result};
pub use geometry::{oriented_area, Convexity, GeometricState, Grid, PolygonCurve};
pub use init::InitialCurve;
pub use linsolve::DEFAULT_CONDITION_CAP;
pub use trajectory::{StepDiagnostics, TrajectoryRecord};
pub use vec2::{Mat2, Vec2};
