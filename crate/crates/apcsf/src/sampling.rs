//! Seeded random test states: polygons and cyclic block systems.
//!
//! Used by the randomized self-check suites and by the test code; callers
//! supply the RNG so runs are reproducible from a printed seed.

use rand::Rng;

use crate::fulldiscrete::CyclicBlockTridiagonalSystem;
use crate::geometry::PolygonCurve;
use crate::vec2::{Mat2, Vec2};

/// Angles with bounded gaps, summing to a full turn after a random offset.
fn random_angles<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let gaps: Vec<f64> = (0..n).map(|_| rng.gen_range(0.35..1.65)).collect();
    let total: f64 = gaps.iter().sum();
    let offset = rng.gen_range(0.0..std::f64::consts::TAU);
    let mut acc = 0.0;
    gaps.iter()
        .map(|g| {
            let angle = offset + std::f64::consts::TAU * acc / total;
            acc += g;
            angle
        })
        .collect()
}

/// Random convex polygon: sorted angles on a circle of random radius and
/// centre. Points in convex position are convex for any angle set.
pub fn random_convex_polygon<R: Rng>(rng: &mut R, n: usize) -> PolygonCurve {
    let r = rng.gen_range(0.5..2.0);
    let centre = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let vertices = random_angles(rng, n)
        .into_iter()
        .map(|phi| centre + Vec2::new(r * phi.cos(), r * phi.sin()))
        .collect();
    PolygonCurve::new(vertices).expect("convex sample is a valid polygon")
}

/// Random star-shaped polygon: sorted angles with jittered radii. Usually
/// nonconvex, always simple and nondegenerate.
pub fn random_star_polygon<R: Rng>(rng: &mut R, n: usize) -> PolygonCurve {
    let r = rng.gen_range(0.6..1.6);
    let centre = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let vertices = random_angles(rng, n)
        .into_iter()
        .map(|phi| {
            let rj = r * rng.gen_range(0.72..1.35);
            centre + Vec2::new(rj * phi.cos(), rj * phi.sin())
        })
        .collect();
    PolygonCurve::new(vertices).expect("star sample is a valid polygon")
}

fn random_block<R: Rng>(rng: &mut R) -> Mat2 {
    Mat2::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    )
}

/// Random strictly row-diagonally-dominant cyclic block tridiagonal system,
/// safe for elimination without pivoting.
pub fn random_block_system<R: Rng>(rng: &mut R, n: usize) -> CyclicBlockTridiagonalSystem {
    let lower: Vec<Mat2> = (0..n).map(|_| random_block(rng)).collect();
    let upper: Vec<Mat2> = (0..n).map(|_| random_block(rng)).collect();
    let mut diag = Vec::with_capacity(n);
    for j in 0..n {
        let mut d = random_block(rng);
        let row0 = d.a.abs()
            + d.b.abs()
            + lower[j].a.abs()
            + lower[j].b.abs()
            + upper[j].a.abs()
            + upper[j].b.abs();
        let row1 = d.c.abs()
            + d.d.abs()
            + lower[j].c.abs()
            + lower[j].d.abs()
            + upper[j].c.abs()
            + upper[j].d.abs();
        d.a += (row0 + rng.gen_range(0.5..2.0)) * d.a.signum();
        d.d += (row1 + rng.gen_range(0.5..2.0)) * d.d.signum();
        diag.push(d);
    }
    let rhs: Vec<Vec2> =
        (0..n).map(|_| Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    CyclicBlockTridiagonalSystem { diag, upper, lower, rhs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn convex_samples_are_convex() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let n = rng.gen_range(4..40);
            let poly = random_convex_polygon(&mut rng, n);
            assert!(poly.convexity().is_convex());
            assert!(poly.min_edge() > 1e-4);
        }
    }

    #[test]
    fn star_samples_are_nondegenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let n = rng.gen_range(4..40);
            let poly = random_star_polygon(&mut rng, n);
            assert!(poly.min_edge() > 1e-4);
            assert!(poly.shoelace_area() > 0.0);
        }
    }

    #[test]
    fn block_system_rows_are_dominant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sys = random_block_system(&mut rng, 12);
        for j in 0..12 {
            let d = sys.diag[j];
            let off0 = d.b.abs()
                + sys.lower[j].a.abs()
                + sys.lower[j].b.abs()
                + sys.upper[j].a.abs()
                + sys.upper[j].b.abs();
            let off1 = d.c.abs()
                + sys.lower[j].c.abs()
                + sys.lower[j].d.abs()
                + sys.upper[j].c.abs()
                + sys.upper[j].d.abs();
            assert!(d.a.abs() > off0);
            assert!(d.d.abs() > off1);
        }
    }
}
