//! Independent finite element assembly of the semidiscrete weak form.
//!
//! For a polygon state `X_h` and a candidate vertex velocity `V`, the
//! residual row `j` pairs
//!
//! ```text
//! int |dX_h| V_h . phi_j  +  int (dX_h/|dX_h|) . dphi_j
//!   + int (h^2 |dX_h| / 6) dV_h . dphi_j  +  int (2 pi / L) (dX_h)^perp . phi_j
//! ```
//!
//! against the hat function at node `j`, component by component. Every
//! integrand is a polynomial of degree at most two per interval, so each
//! element integral is evaluated by its closed-form antiderivative rather
//! than numerical quadrature. The assembly is kept term-by-term as a route
//! independent of the lumped-mass vertex formula it certifies: plugging the
//! lumped velocity in drives every row to roundoff.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{Grid, PolygonCurve};
use crate::vec2::Vec2;

/// Weak-form pairings per test function, plus the natural scale of the mass
/// pairing for relative comparisons.
#[derive(Clone, Debug)]
pub struct WeakFormResidual {
    /// Row `j` holds the pairings against `(phi_j, 0)` and `(0, phi_j)` as
    /// the two components of one vector.
    pub rows: Vec<Vec2>,
    /// `max_j (q_j + q_{j+1})/2 * |V_j|`, the size of the lumped mass term.
    pub mass_scale: f64,
}

impl WeakFormResidual {
    pub fn max_abs(&self) -> f64 {
        self.rows.iter().map(|r| r.norm()).fold(0.0, f64::max)
    }

    /// Largest row relative to the mass scale.
    pub fn relative(&self) -> f64 {
        self.max_abs() / self.mass_scale.max(f64::MIN_POSITIVE)
    }
}

/// Assemble the weak-form residual of `velocity` at the state `curve` on
/// `grid`, element by element with exact integrals.
pub fn assemble_residual(
    curve: &PolygonCurve,
    velocity: &[Vec2],
    grid: &Grid,
) -> Result<WeakFormResidual> {
    let n = curve.n();
    if grid.n() != n || velocity.len() != n {
        return Err(Error::InvalidParameter(format!(
            "weak form needs matching sizes: curve {}, velocity {}, grid {}",
            n,
            velocity.len(),
            grid.n()
        )));
    }
    let gs = curve.geometric_state()?;
    let v = curve.vertices();
    let mut rows = vec![Vec2::ZERO; n];
    // interval i hosts the edge from vertex i to vertex i+1; on it the left
    // hat function falls from 1 to 0 and the right hat rises from 0 to 1
    for i in 0..n {
        let ip = (i + 1) % n;
        let h = grid.interval(i);
        let edge = v[ip] - v[i];
        let q = edge.norm();
        let speed = q / h; // |dX_h| on the interval
        let tangent = edge * (1.0 / q);
        let normal = tangent.perp();
        let (va, vb) = (velocity[i], velocity[ip]);

        // mass: int |dX| V_h phi, with int phi_a phi_b = h/3 or h/6
        rows[i] += speed * (va * (h / 3.0) + vb * (h / 6.0));
        rows[ip] += speed * (va * (h / 6.0) + vb * (h / 3.0));

        // stiffness: int T . dphi, dphi = -1/h (left) or +1/h (right)
        rows[i] += tangent * (-1.0 / h) * h;
        rows[ip] += tangent * (1.0 / h) * h;

        // lumping: int (h^2 |dX| / 6) dV . dphi, dV constant on the interval
        let dv = (vb - va) * (1.0 / h);
        rows[i] += dv * (h * h / 6.0 * speed) * (-1.0 / h) * h;
        rows[ip] += dv * (h * h / 6.0 * speed) * (1.0 / h) * h;

        // nonlocal: int (2 pi / L) (dX)^perp phi, with int phi = h/2
        let perp_term = normal * (speed * 2.0 * PI / gs.perimeter) * (h / 2.0);
        rows[i] += perp_term;
        rows[ip] += perp_term;
    }
    let mass_scale = (0..n)
        .map(|j| {
            let jp = (j + 1) % n;
            0.5 * (gs.edge_lengths[j] + gs.edge_lengths[jp]) * velocity[j].norm()
        })
        .fold(0.0, f64::max);
    Ok(WeakFormResidual { rows, mass_scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::regular_polygon;
    use crate::init::{interpolate, uniform_grid, InitialCurve};
    use crate::semidiscrete;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lumped_velocity_zeroes_the_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(201);
        for _ in 0..1000 {
            let n = rng.gen_range(4..=64);
            let poly = crate::sampling::random_star_polygon(&mut rng, n);
            let grid = uniform_grid(n).unwrap();
            let field = semidiscrete::rhs(&poly).unwrap();
            let res = assemble_residual(&poly, &field.velocity, &grid).unwrap();
            assert!(res.relative() <= 1e-12, "relative residual {}", res.relative());
        }
    }

    #[test]
    fn lumped_velocity_zeroes_the_residual_on_nonuniform_grids() {
        // the lumped form is grid-independent; the assembled terms cancel
        // interval by interval for any admissible partition
        let mut rng = ChaCha8Rng::seed_from_u64(211);
        for _ in 0..100 {
            let n = rng.gen_range(4..24);
            let poly = crate::sampling::random_convex_polygon(&mut rng, n);
            let mut nodes = vec![0.0];
            let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
            let total: f64 = weights.iter().sum();
            for w in &weights[..n - 1] {
                nodes.push(nodes.last().unwrap() + w / total * std::f64::consts::TAU);
            }
            nodes.push(std::f64::consts::TAU);
            let grid = Grid::from_nodes(nodes).unwrap();
            let field = semidiscrete::rhs(&poly).unwrap();
            let res = assemble_residual(&poly, &field.velocity, &grid).unwrap();
            assert!(res.relative() <= 1e-12);
        }
    }

    #[test]
    fn mass_plus_lumping_equals_lumped_mass_pairing() {
        let mut rng = ChaCha8Rng::seed_from_u64(223);
        for _ in 0..200 {
            let n = rng.gen_range(4..32);
            let poly = crate::sampling::random_star_polygon(&mut rng, n);
            let grid = uniform_grid(n).unwrap();
            let gs = poly.geometric_state().unwrap();
            let velocity: Vec<Vec2> = (0..n)
                .map(|_| Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            // assemble only mass + lumping by cancelling the other terms:
            // residual(V) - residual(0) isolates the velocity-dependent part
            let with_v = assemble_residual(&poly, &velocity, &grid).unwrap();
            let zero = vec![Vec2::ZERO; n];
            let without = assemble_residual(&poly, &zero, &grid).unwrap();
            for j in 0..n {
                let jp = (j + 1) % n;
                let lumped = velocity[j] * (0.5 * (gs.edge_lengths[j] + gs.edge_lengths[jp]));
                let assembled = with_v.rows[j] - without.rows[j];
                assert!(
                    (assembled - lumped).norm() <= 1e-13 * lumped.norm().max(1.0),
                    "vertex {j}"
                );
            }
        }
    }

    #[test]
    fn zero_velocity_on_regular_polygon_gives_radial_rows() {
        for n in [4usize, 8, 32] {
            let poly = regular_polygon(n, 1.0).unwrap();
            let grid = uniform_grid(n).unwrap();
            let zero = vec![Vec2::ZERO; n];
            let res = assemble_residual(&poly, &zero, &grid).unwrap();
            let x = PI / n as f64;
            let expected = 2.0 * x.sin() - 2.0 * x * x.cos();
            for (j, row) in res.rows.iter().enumerate() {
                let radial = poly.vertices()[j] * (1.0 / poly.vertices()[j].norm());
                assert!((row.norm() - expected).abs() < 1e-13, "n={n} j={j}");
                assert!(row.dot(radial.perp()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn residual_is_linear_in_the_velocity_dependent_part() {
        let grid = uniform_grid(12).unwrap();
        let poly = interpolate(&InitialCurve::ellipse(2.0, 1.0).unwrap(), &grid).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(227);
        let velocity: Vec<Vec2> = (0..12)
            .map(|_| Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let scaled: Vec<Vec2> = velocity.iter().map(|&v| v * 3.5).collect();
        let zero = vec![Vec2::ZERO; 12];
        let base = assemble_residual(&poly, &zero, &grid).unwrap();
        let r1 = assemble_residual(&poly, &velocity, &grid).unwrap();
        let r3 = assemble_residual(&poly, &scaled, &grid).unwrap();
        for j in 0..12 {
            let lin = (r1.rows[j] - base.rows[j]) * 3.5 + base.rows[j];
            assert!((r3.rows[j] - lin).norm() <= 1e-13 * lin.norm().max(1.0));
        }
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let poly = regular_polygon(6, 1.0).unwrap();
        let grid = uniform_grid(8).unwrap();
        let zero = vec![Vec2::ZERO; 6];
        assert!(assemble_residual(&poly, &zero, &grid).is_err());
    }
}
