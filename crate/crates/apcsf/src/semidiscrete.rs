//! The lumped-mass vertex ODE for the area-preserving curve shortening flow,
//! its Runge-Kutta time integration, and the closed-form evolution rates used
//! as runtime monitors.
//!
//! The velocity of vertex `j` is
//!
//! ```text
//! (q_j + q_{j+1}) / 2 * dX_j/dt
//!     = T_{j+1} - T_j - (pi / L) * (X_{j+1} - X_{j-1})^perp
//! ```
//!
//! where `q` are edge lengths, `T` unit tangents and `L` the perimeter. The
//! last term is the nonlocal area-preserving correction; dropping it gives
//! plain curve shortening (see [`FlowVariant`]).

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::{GeometricState, PolygonCurve, DEFAULT_EDGE_FLOOR_REL};
use crate::trajectory::TrajectoryRecord;
use crate::vec2::Vec2;

/// Whether the nonlocal `pi / L` term is kept (the area-preserving flow) or
/// zeroed (classical curve shortening, for A/B diagnostics only).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FlowVariant {
    #[default]
    AreaPreserving,
    PlainShortening,
}

impl FlowVariant {
    #[inline]
    fn nonlocal_coefficient(self, perimeter: f64) -> f64 {
        match self {
            FlowVariant::AreaPreserving => PI / perimeter,
            FlowVariant::PlainShortening => 0.0,
        }
    }
}

/// Vertex velocities of a polygon state together with the edge-averaged
/// nonlocal part `R_j = -(2 pi / L) (q_j N_j + q_{j+1} N_{j+1}) / (q_j + q_{j+1})`.
///
/// The two satisfy `dX_j/dt - R_j = 2 (T_{j+1} - T_j) / (q_j + q_{j+1})`.
#[derive(Clone, Debug)]
pub struct VertexVelocityField {
    pub velocity: Vec<Vec2>,
    pub nonlocal: Vec<Vec2>,
}

/// Lumped-mass velocity of every vertex.
pub fn rhs(curve: &PolygonCurve) -> Result<VertexVelocityField> {
    rhs_with(curve, FlowVariant::AreaPreserving)
}

pub fn rhs_with(curve: &PolygonCurve, variant: FlowVariant) -> Result<VertexVelocityField> {
    let gs = curve.geometric_state()?;
    let v = curve.vertices();
    let n = v.len();
    let q = &gs.edge_lengths;
    let t = &gs.tangents;
    let nrm = &gs.normals;
    let coeff = variant.nonlocal_coefficient(gs.perimeter);
    let mut velocity = Vec::with_capacity(n);
    let mut nonlocal = Vec::with_capacity(n);
    for j in 0..n {
        let jp = (j + 1) % n;
        let jm = (j + n - 1) % n;
        let mass = q[j] + q[jp];
        let chord = v[jp] - v[jm];
        velocity.push((t[jp] - t[j] - coeff * chord.perp()) * (2.0 / mass));
        nonlocal.push((nrm[j] * q[j] + nrm[jp] * q[jp]) * (-2.0 * coeff / mass));
    }
    Ok(VertexVelocityField { velocity, nonlocal })
}

pub(crate) fn velocity_at(
    vertices: &[Vec2],
    variant: FlowVariant,
    edge_floor_rel: f64,
) -> Result<Vec<Vec2>> {
    let gs = GeometricState::compute(vertices, edge_floor_rel)?;
    let n = vertices.len();
    let q = &gs.edge_lengths;
    let t = &gs.tangents;
    let coeff = variant.nonlocal_coefficient(gs.perimeter);
    Ok((0..n)
        .map(|j| {
            let jp = (j + 1) % n;
            let jm = (j + n - 1) % n;
            let chord = vertices[jp] - vertices[jm];
            (t[jp] - t[j] - coeff * chord.perp()) * (2.0 / (q[j] + q[jp]))
        })
        .collect())
}

fn rk4_once(x: &[Vec2], dt: f64, variant: FlowVariant, edge_floor_rel: f64) -> Result<Vec<Vec2>> {
    let n = x.len();
    let stage = |base: &[Vec2], k: &[Vec2], factor: f64| -> Vec<Vec2> {
        (0..n).map(|j| base[j] + k[j] * factor).collect()
    };
    let k1 = velocity_at(x, variant, edge_floor_rel)?;
    let k2 = velocity_at(&stage(x, &k1, 0.5 * dt), variant, edge_floor_rel)?;
    let k3 = velocity_at(&stage(x, &k2, 0.5 * dt), variant, edge_floor_rel)?;
    let k4 = velocity_at(&stage(x, &k3, dt), variant, edge_floor_rel)?;
    Ok((0..n).map(|j| x[j] + (k1[j] + (k2[j] + k3[j]) * 2.0 + k4[j]) * (dt / 6.0)).collect())
}

/// One classical four-stage Runge-Kutta step.
///
/// `dt = 0` returns the state unchanged; a negative `dt` integrates
/// backwards (used by finite-difference oracles).
pub fn step_rk4(curve: &PolygonCurve, dt: f64) -> Result<PolygonCurve> {
    step_rk4_with(curve, dt, FlowVariant::AreaPreserving)
}

pub fn step_rk4_with(curve: &PolygonCurve, dt: f64, variant: FlowVariant) -> Result<PolygonCurve> {
    if !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("time step must be finite, got {dt}")));
    }
    let next = rk4_once(curve.vertices(), dt, variant, DEFAULT_EDGE_FLOOR_REL)?;
    Ok(PolygonCurve::from_vertices_unchecked(next))
}

/// Integrate to `t_end` with fixed step `dt` (the final step is shortened to
/// land on `t_end` exactly), recording every `record_every`-th step plus the
/// initial and final states.
pub fn evolve(
    curve: &PolygonCurve,
    t_end: f64,
    dt: f64,
    record_every: usize,
) -> Result<TrajectoryRecord> {
    evolve_with(curve, t_end, dt, record_every, FlowVariant::AreaPreserving, DEFAULT_EDGE_FLOOR_REL)
}

pub fn evolve_with(
    curve: &PolygonCurve,
    t_end: f64,
    dt: f64,
    record_every: usize,
    variant: FlowVariant,
    edge_floor_rel: f64,
) -> Result<TrajectoryRecord> {
    if !(t_end > 0.0) {
        return Err(Error::InvalidParameter(format!("t_end must be positive, got {t_end}")));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if record_every == 0 {
        return Err(Error::InvalidParameter("record_every must be at least 1".into()));
    }
    let ratio = t_end / dt;
    let steps = if (ratio - ratio.round()).abs() < 1e-9 {
        (ratio.round() as usize).max(1)
    } else {
        ratio.ceil() as usize
    };
    let mut record = TrajectoryRecord::new(record_every);
    record.total_steps = steps;
    record.push(0.0, curve.clone())?;
    let mut state = curve.vertices().to_vec();
    let mut t = 0.0;
    for k in 1..=steps {
        let target = if k == steps { t_end } else { k as f64 * dt };
        state =
            rk4_once(&state, target - t, variant, edge_floor_rel).map_err(|e| e.at_time(target))?;
        t = target;
        if k % record_every == 0 || k == steps {
            record
                .push(t, PolygonCurve::from_vertices_unchecked(state.clone()))
                .map_err(|e| e.at_time(t))?;
        }
    }
    Ok(record)
}

/// Default parabolic step heuristic: `0.1 * (min edge)^2` at the given state.
pub fn default_time_step(curve: &PolygonCurve) -> f64 {
    let q = curve.min_edge();
    0.1 * q * q
}

/// The rate of change of every edge length, in two algebraically equivalent
/// forms: one from tangent differences, one from the vertex velocities.
#[derive(Clone, Debug)]
pub struct EdgeRates {
    /// `-|T_{j+1}-T_j|^2/(q_j+q_{j+1}) - |T_{j-1}-T_j|^2/(q_j+q_{j-1})
    ///  + T_j . (R_j - R_{j-1})`
    pub from_tangents: Vec<f64>,
    /// `-(q_j+q_{j+1})/4 |dX_j - R_j|^2 - (q_j+q_{j-1})/4 |dX_{j-1} - R_{j-1}|^2
    ///  + T_j . (R_j - R_{j-1})`
    pub from_velocity: Vec<f64>,
}

pub fn edge_rate(curve: &PolygonCurve) -> Result<EdgeRates> {
    let gs = curve.geometric_state()?;
    let field = rhs(curve)?;
    let n = gs.n();
    let q = &gs.edge_lengths;
    let t = &gs.tangents;
    let mut from_tangents = Vec::with_capacity(n);
    let mut from_velocity = Vec::with_capacity(n);
    for j in 0..n {
        let jp = (j + 1) % n;
        let jm = (j + n - 1) % n;
        let shared = t[j].dot(field.nonlocal[j] - field.nonlocal[jm]);
        from_tangents.push(
            -(t[jp] - t[j]).norm_sq() / (q[j] + q[jp]) - (t[jm] - t[j]).norm_sq() / (q[j] + q[jm])
                + shared,
        );
        from_velocity.push(
            -0.25 * (q[j] + q[jp]) * (field.velocity[j] - field.nonlocal[j]).norm_sq()
                - 0.25 * (q[j] + q[jm]) * (field.velocity[jm] - field.nonlocal[jm]).norm_sq()
                + shared,
        );
    }
    Ok(EdgeRates { from_tangents, from_velocity })
}

/// The rate of change of every oriented fan area `S_j` along the flow.
pub fn fan_area_rate(curve: &PolygonCurve) -> Result<Vec<f64>> {
    let gs = curve.geometric_state()?;
    let v = curve.vertices();
    let n = gs.n();
    let q = &gs.edge_lengths;
    let s = &gs.fan_areas;
    let coeff = PI / gs.perimeter;
    let area = crate::geometry::oriented_area;
    Ok((0..n)
        .map(|j| {
            let jp = (j + 1) % n;
            let jpp = (j + 2) % n;
            let jm = (j + n - 1) % n;
            let jmm = (j + n - 2) % n;
            let a = 2.0 / (q[j] * q[jm]) + 2.0 / (q[j] * q[jp]) + 2.0 / (q[jp] * q[jpp]);
            let b = 2.0 / (q[jm] * (q[jm] + q[j]));
            let c = 2.0 / (q[jpp] * (q[jp] + q[jpp]));
            // extended fans: (X_j, X_{j+1}, X_{j-2}) and (X_{j-1}, X_j, X_{j+2})
            let s_behind = area(v[j], v[jp], v[jmm]);
            let s_ahead = area(v[jm], v[j], v[jpp]);
            -a * s[j]
                + b * s_behind
                + c * s_ahead
                + coeff * (v[jp] - v[jm]).norm_sq() / (q[j] + q[jp])
                + coeff * (v[j] - v[jp]).dot(v[j] - v[jmm]) / (q[jm] + q[j])
                + coeff * (v[j] - v[jm]).dot(v[j] - v[jpp]) / (q[jp] + q[jpp])
        })
        .collect())
}

/// The rate of change of the perimeter,
/// `-2 sum |T_{j+1}-T_j|^2/(q_j+q_{j+1}) - (2 pi / L) sum T_j . N_{j+1}`;
/// nonpositive on convex polygons.
pub fn perimeter_rate(curve: &PolygonCurve) -> Result<f64> {
    let gs = curve.geometric_state()?;
    let n = gs.n();
    let q = &gs.edge_lengths;
    let t = &gs.tangents;
    let mut bending = 0.0;
    let mut turning = 0.0;
    for j in 0..n {
        let jp = (j + 1) % n;
        bending += (t[jp] - t[j]).norm_sq() / (q[j] + q[jp]);
        turning += t[j].dot(gs.normals[jp]);
    }
    Ok(-2.0 * bending - TAU / gs.perimeter * turning)
}

/// The trigonometric functional
/// `f(beta) = (sum sin b_j)^2 - 1/2 (sum b_j) (sum sin 2 b_j)`,
/// nonnegative on `[0, pi/2]^n`.
pub fn trig_inequality(betas: &[f64]) -> Result<f64> {
    for &b in betas {
        if !(0.0..=FRAC_PI_2).contains(&b) {
            return Err(Error::DomainError { value: b, lo: 0.0, hi: FRAC_PI_2 });
        }
    }
    let sin_sum: f64 = betas.iter().map(|b| b.sin()).sum();
    let beta_sum: f64 = betas.iter().sum();
    let sin2_sum: f64 = betas.iter().map(|b| (2.0 * b).sin()).sum();
    Ok(sin_sum * sin_sum - 0.5 * beta_sum * sin2_sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::regular_polygon;
    use crate::init::{interpolate, uniform_grid, InitialCurve};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Inward radial speed of the regular n-gon with circumradius r:
    /// `(1 - (pi/n) cot(pi/n)) / r`.
    fn regular_polygon_rate(n: usize, r: f64) -> f64 {
        let x = PI / n as f64;
        (1.0 - x * x.cos() / x.sin()) / r
    }

    #[test]
    fn square_velocity_is_radial() {
        let poly = regular_polygon(4, 1.0).unwrap();
        let field = rhs(&poly).unwrap();
        let expected = 1.0 - PI / 4.0;
        for (j, vel) in field.velocity.iter().enumerate() {
            let radial = poly.vertices()[j] * (1.0 / poly.vertices()[j].norm());
            let inward = -vel.dot(radial);
            let tangential = vel.dot(radial.perp());
            assert!((inward - expected).abs() < 1e-12, "vertex {j}: inward {inward}");
            assert!(tangential.abs() < 1e-13);
        }
        // closed form agrees
        assert!((regular_polygon_rate(4, 1.0) - expected).abs() < 1e-15);
    }

    #[test]
    fn fine_regular_polygon_is_nearly_stationary() {
        let poly = regular_polygon(256, 1.0).unwrap();
        let field = rhs(&poly).unwrap();
        let max = field.velocity.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(max <= 1e-3, "max speed {max}");
        assert!((max - regular_polygon_rate(256, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn rate_decays_quadratically_in_n() {
        let mut prev = regular_polygon_rate(8, 1.0);
        for n in [16usize, 32, 64] {
            let rate = regular_polygon_rate(n, 1.0);
            let ratio = prev / rate;
            assert!((ratio - 4.0).abs() < 0.6, "n={n} ratio {ratio}");
            prev = rate;
        }
    }

    #[test]
    fn rotation_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let poly = crate::sampling::random_convex_polygon(&mut rng, 11);
        let theta: f64 = 0.83;
        let rot = |v: Vec2| {
            Vec2::new(v.x * theta.cos() - v.y * theta.sin(), v.x * theta.sin() + v.y * theta.cos())
        };
        let rotated = PolygonCurve::new(poly.vertices().iter().map(|&v| rot(v)).collect()).unwrap();
        let base = rhs(&poly).unwrap();
        let turned = rhs(&rotated).unwrap();
        for j in 0..11 {
            assert!((turned.velocity[j] - rot(base.velocity[j])).norm() < 1e-13);
        }
    }

    #[test]
    fn translation_and_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let poly = crate::sampling::random_convex_polygon(&mut rng, 9);
        let scale: f64 = {
            let f = rhs(&poly).unwrap();
            f.velocity.iter().map(|v| v.norm()).fold(0.0, f64::max)
        };

        let shift = Vec2::new(0.37, -1.25);
        let moved =
            PolygonCurve::new(poly.vertices().iter().map(|&v| v + shift).collect()).unwrap();
        let a = rhs(&poly).unwrap();
        let b = rhs(&moved).unwrap();
        for j in 0..9 {
            assert!((a.velocity[j] - b.velocity[j]).norm() <= 1e-13 * scale);
        }

        let lambda = 2.75;
        let scaled =
            PolygonCurve::new(poly.vertices().iter().map(|&v| v * lambda).collect()).unwrap();
        let c = rhs(&scaled).unwrap();
        for j in 0..9 {
            assert!((c.velocity[j] * lambda - a.velocity[j]).norm() <= 1e-13 * scale);
        }
    }

    #[test]
    fn velocity_identity_links_nonlocal_part() {
        // (q_j + q_{j+1}) / 2 * (dX_j - R_j) == T_{j+1} - T_j
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..200 {
            let n = rng.gen_range(4..32);
            let poly = crate::sampling::random_star_polygon(&mut rng, n);
            let gs = poly.geometric_state().unwrap();
            let field = rhs(&poly).unwrap();
            for j in 0..n {
                let jp = (j + 1) % n;
                let lhs = (field.velocity[j] - field.nonlocal[j])
                    * (0.5 * (gs.edge_lengths[j] + gs.edge_lengths[jp]));
                let rhs_v = gs.tangents[jp] - gs.tangents[j];
                assert!((lhs - rhs_v).norm() <= 1e-13 * (1.0 + rhs_v.norm()));
            }
        }
    }

    #[test]
    fn rk4_zero_step_is_identity() {
        let poly = regular_polygon(5, 1.0).unwrap();
        let same = step_rk4(&poly, 0.0).unwrap();
        assert_eq!(poly.vertices(), same.vertices());
    }

    #[test]
    fn rk4_square_moves_inward() {
        let poly = regular_polygon(4, 1.0).unwrap();
        let dt = 1e-6;
        let next = step_rk4(&poly, dt).unwrap();
        let rate = 1.0 - PI / 4.0;
        for j in 0..4 {
            let moved = (next.vertices()[j] - poly.vertices()[j]).norm();
            assert!((moved - dt * rate).abs() < 10.0 * dt * dt);
        }
    }

    #[test]
    fn rk4_is_fourth_order() {
        // global error against a fine reference halves by ~16 per dt halving
        let grid = uniform_grid(32).unwrap();
        let poly = interpolate(&InitialCurve::ellipse(2.0, 1.0).unwrap(), &grid).unwrap();
        let t_end = 0.02;
        let reference = evolve(&poly, t_end, 1.25e-4, usize::MAX).unwrap();
        let err = |dt: f64| -> f64 {
            let run = evolve(&poly, t_end, dt, usize::MAX).unwrap();
            run.final_curve()
                .vertices()
                .iter()
                .zip(reference.final_curve().vertices())
                .map(|(a, b)| (*a - *b).norm())
                .fold(0.0, f64::max)
        };
        let e1 = err(4e-3);
        let e2 = err(2e-3);
        let ratio = e1 / e2;
        assert!((12.0..22.0).contains(&ratio), "order ratio {ratio}");
    }

    #[test]
    fn evolve_lands_exactly_and_records() {
        let poly = regular_polygon(8, 1.0).unwrap();
        let record = evolve(&poly, 0.05, 0.004, 3).unwrap();
        assert_eq!(record.total_steps, 13);
        assert_eq!(*record.times.last().unwrap(), 0.05);
        // steps 0, 3, 6, 9, 12, 13
        assert_eq!(record.len(), 6);
        assert!(record.times.windows(2).all(|w| w[1] > w[0]));

        assert!(evolve(&poly, 0.0, 0.1, 1).is_err());
        assert!(evolve(&poly, 1.0, 0.0, 1).is_err());
        assert!(evolve(&poly, 1.0, 0.1, 0).is_err());
    }

    #[test]
    fn near_circle_is_near_stationary_over_time() {
        let grid = uniform_grid(256).unwrap();
        let poly = interpolate(&InitialCurve::circle(1.0).unwrap(), &grid).unwrap();
        let dt = default_time_step(&poly);
        let record = evolve(&poly, 0.25, dt, usize::MAX).unwrap();
        let l0 = record.diagnostics[0].perimeter;
        let l1 = record.diagnostics.last().unwrap().perimeter;
        assert!((l1 - l0).abs() / l0 < 5e-3, "perimeter drift {}", (l1 - l0) / l0);
    }

    #[test]
    fn semidiscrete_area_drift_scales_quadratically() {
        // the continuum flow preserves area exactly; the polygon drift is a
        // space-discretization artifact and quarters per mesh doubling
        let drift = |n: usize| -> f64 {
            let grid = uniform_grid(n).unwrap();
            let poly = interpolate(&InitialCurve::ellipse(2.0, 1.0).unwrap(), &grid).unwrap();
            let record = evolve(&poly, 0.25, default_time_step(&poly), usize::MAX).unwrap();
            (record.diagnostics.last().unwrap().area - record.diagnostics[0].area).abs()
        };
        let ratio = drift(16) / drift(32);
        assert!((2.4..6.4).contains(&ratio), "drift ratio {ratio}");
    }

    #[test]
    fn ellipse_run_stays_convex_and_shrinks_perimeter() {
        let grid = uniform_grid(15).unwrap();
        let poly = interpolate(&InitialCurve::ellipse(2.0, 1.0).unwrap(), &grid).unwrap();
        let dt = default_time_step(&poly);
        let record = evolve(&poly, 3.0, dt, 5).unwrap();
        for d in &record.diagnostics {
            assert!(d.min_fan_area > 0.0);
        }
        for w in record.diagnostics.windows(2) {
            assert!(w[1].perimeter <= w[0].perimeter + 1e-10 * record.diagnostics[0].perimeter);
        }
    }

    /// Forward state at time +/- delta via small RK4 substeps.
    fn nudged(poly: &PolygonCurve, delta: f64) -> PolygonCurve {
        step_rk4(poly, delta).unwrap()
    }

    #[test]
    fn edge_rate_forms_agree_and_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for trial in 0..1000 {
            let n = rng.gen_range(4..24);
            let poly = crate::sampling::random_convex_polygon(&mut rng, n);
            let rates = edge_rate(&poly).unwrap();
            let scale =
                rates.from_tangents.iter().map(|r| r.abs()).fold(f64::MIN_POSITIVE, f64::max);
            for j in 0..n {
                assert!(
                    (rates.from_tangents[j] - rates.from_velocity[j]).abs() <= 1e-12 * scale,
                    "trial {trial} vertex {j}"
                );
            }
            if trial < 50 {
                let delta = 1e-5;
                let fwd = nudged(&poly, delta).geometric_state().unwrap();
                let bwd = nudged(&poly, -delta).geometric_state().unwrap();
                for j in 0..n {
                    let fd = (fwd.edge_lengths[j] - bwd.edge_lengths[j]) / (2.0 * delta);
                    assert!(
                        (fd - rates.from_tangents[j]).abs() <= 1e-6 * scale.max(1.0),
                        "trial {trial} vertex {j}: fd {fd} vs {}",
                        rates.from_tangents[j]
                    );
                }
            }
        }
    }

    #[test]
    fn edge_rates_equal_on_regular_polygon() {
        let poly = regular_polygon(10, 1.0).unwrap();
        let rates = edge_rate(&poly).unwrap();
        let first = rates.from_tangents[0];
        for r in &rates.from_tangents {
            assert!((r - first).abs() < 1e-13);
        }
    }

    #[test]
    fn fan_area_rate_matches_product_rule_and_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for trial in 0..300 {
            let n = rng.gen_range(3..24);
            let poly = crate::sampling::random_convex_polygon(&mut rng, n);
            let rates = fan_area_rate(&poly).unwrap();
            let scale = rates.iter().map(|r| r.abs()).fold(f64::MIN_POSITIVE, f64::max);

            // product-rule oracle from the velocity field alone
            let field = rhs(&poly).unwrap();
            let v = poly.vertices();
            for j in 0..n {
                let jp = (j + 1) % n;
                let jm = (j + n - 1) % n;
                let chain = 0.5
                    * (field.velocity[jp] - field.velocity[j]).dot((v[j] - v[jm]).perp())
                    + 0.5 * (v[jp] - v[j]).dot((field.velocity[j] - field.velocity[jm]).perp());
                assert!(
                    (chain - rates[j]).abs() <= 1e-12 * scale,
                    "trial {trial} n={n} vertex {j}: chain {chain} vs {}",
                    rates[j]
                );
            }

            if trial < 50 {
                let delta = 1e-5;
                let fwd = nudged(&poly, delta).fan_areas();
                let bwd = nudged(&poly, -delta).fan_areas();
                for j in 0..n {
                    let fd = (fwd[j] - bwd[j]) / (2.0 * delta);
                    assert!((fd - rates[j]).abs() <= 1e-6 * scale.max(1.0));
                }
            }
        }
    }

    #[test]
    fn fan_area_rates_equal_on_regular_polygon() {
        let poly = regular_polygon(9, 1.2).unwrap();
        let rates = fan_area_rate(&poly).unwrap();
        for r in &rates {
            assert!((r - rates[0]).abs() < 1e-13);
        }
    }

    #[test]
    fn perimeter_rate_sums_edge_rates_and_is_nonpositive_on_convex() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..1000 {
            let n = rng.gen_range(4..32);
            let poly = crate::sampling::random_convex_polygon(&mut rng, n);
            let total = perimeter_rate(&poly).unwrap();
            let per_edge: f64 = edge_rate(&poly).unwrap().from_tangents.iter().sum();
            assert!((total - per_edge).abs() <= 1e-12 * total.abs().max(1.0));
            assert!(total <= 1e-12);
        }
    }

    #[test]
    fn perimeter_rate_regular_polygon_closed_form() {
        // |T_{j+1}-T_j|^2 = 4 sin^2(alpha/2) and T_j . N_{j+1} = -sin(alpha)
        // reduce the rate to -n (4 sin^2(pi/n)/q - (2 pi/(n q)) sin(2 pi/n))
        for n in [4usize, 8, 20] {
            let poly = regular_polygon(n, 1.0).unwrap();
            let q = 2.0 * (PI / n as f64).sin();
            let alpha = TAU / n as f64;
            let expected = -(n as f64)
                * (4.0 * (alpha / 2.0).sin().powi(2) / q - TAU / (n as f64 * q) * alpha.sin());
            let got = perimeter_rate(&poly).unwrap();
            assert!((got - expected).abs() < 1e-12, "n={n}: {got} vs {expected}");
            assert!(got <= 0.0);
        }
    }

    #[test]
    fn trig_inequality_values() {
        assert!((trig_inequality(&[FRAC_PI_2]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(trig_inequality(&[0.0]).unwrap(), 0.0);
        let expected = 0.5 - PI / 8.0;
        assert!((trig_inequality(&[PI / 4.0]).unwrap() - expected).abs() < 1e-15);
        assert!(trig_inequality(&[-0.1]).is_err());
        assert!(trig_inequality(&[FRAC_PI_2 + 1e-12]).is_err());
        assert!(trig_inequality(&[f64::NAN]).is_err());
    }

    #[test]
    fn trig_inequality_boundary_identity_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..200 {
            let n = rng.gen_range(1..20);
            let mut betas: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..FRAC_PI_2)).collect();
            let shorter = trig_inequality(&betas).unwrap();
            betas.push(0.0);
            let longer = trig_inequality(&betas).unwrap();
            assert_eq!(shorter, longer);
        }
    }

    #[test]
    fn trig_inequality_nonnegative_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for n in 1..=20usize {
            for _ in 0..2000 {
                let betas: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=FRAC_PI_2)).collect();
                assert!(trig_inequality(&betas).unwrap() >= -1e-12);
            }
        }
    }

    #[test]
    fn plain_shortening_variant_drops_nonlocal_term() {
        let poly = regular_polygon(4, 1.0).unwrap();
        let field = rhs_with(&poly, FlowVariant::PlainShortening).unwrap();
        // pure curvature motion of the unit-circumradius square: dX_j = -X_j
        for j in 0..4 {
            let radial = poly.vertices()[j] * (1.0 / poly.vertices()[j].norm());
            let inward = -field.velocity[j].dot(radial);
            assert!((inward - 1.0).abs() < 1e-13);
            assert_eq!(field.nonlocal[j], Vec2::ZERO);
        }
    }
}
