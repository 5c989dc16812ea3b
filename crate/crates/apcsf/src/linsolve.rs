//! Direct solvers for cyclic block tridiagonal systems with 2x2 blocks.
//!
//! The banded path factors the acyclic band by block elimination without
//! pivoting and folds the two periodic corner blocks back in through a
//! rank-4 Woodbury correction, for O(n) work per solve. A dense partial
//! pivoting elimination covers small systems.

use crate::error::{Error, Result};
use crate::fulldiscrete::CyclicBlockTridiagonalSystem;
use crate::vec2::{Mat2, Vec2};

/// Default cap on the Frobenius condition estimate of a pivot block.
pub const DEFAULT_CONDITION_CAP: f64 = 1e12;

fn guarded_inverse(m: Mat2, cap: f64, block: usize) -> Result<Mat2> {
    if m.cond_frob() > cap {
        return Err(Error::SingularSystem { block });
    }
    m.inverse().ok_or(Error::SingularSystem { block })
}

/// Band-elimination factorization of the acyclic part (corner blocks left
/// out), reusable for several right-hand sides.
struct BandFactor {
    /// Inverses of the pivot blocks `c_i = D_i - L_i * g[i-1]`.
    pivot_inv: Vec<Mat2>,
    /// Back-substitution couplings `g_i = c_i^-1 * U_i`.
    g: Vec<Mat2>,
}

impl BandFactor {
    fn new(sys: &CyclicBlockTridiagonalSystem, cap: f64) -> Result<BandFactor> {
        let n = sys.n();
        let mut pivot_inv = Vec::with_capacity(n);
        let mut g: Vec<Mat2> = Vec::with_capacity(n);
        for i in 0..n {
            let c = if i == 0 { sys.diag[0] } else { sys.diag[i] - sys.lower[i] * g[i - 1] };
            let inv = guarded_inverse(c, cap, i)?;
            // the last row's upper block is a corner, not part of the band
            let u = if i + 1 < n { sys.upper[i] } else { Mat2::ZERO };
            g.push(inv * u);
            pivot_inv.push(inv);
        }
        Ok(BandFactor { pivot_inv, g })
    }

    fn solve_vec(&self, sys: &CyclicBlockTridiagonalSystem, b: &[Vec2]) -> Vec<Vec2> {
        let n = b.len();
        let mut y: Vec<Vec2> = Vec::with_capacity(n);
        for i in 0..n {
            let r = if i == 0 { b[0] } else { b[i] - sys.lower[i] * y[i - 1] };
            y.push(self.pivot_inv[i] * r);
        }
        for i in (0..n - 1).rev() {
            let correction = self.g[i] * y[i + 1];
            y[i] -= correction;
        }
        y
    }

    /// Matrix-valued solve: columns of `B` are treated as two stacked
    /// right-hand sides. `B` has the identity at block `at` and zeros
    /// elsewhere.
    fn solve_unit(&self, sys: &CyclicBlockTridiagonalSystem, at: usize) -> Vec<Mat2> {
        let n = self.g.len();
        let mut y: Vec<Mat2> = Vec::with_capacity(n);
        for i in 0..n {
            let b = if i == at { Mat2::IDENTITY } else { Mat2::ZERO };
            let r = if i == 0 { b } else { b - sys.lower[i] * y[i - 1] };
            y.push(self.pivot_inv[i] * r);
        }
        for i in (0..n - 1).rev() {
            let correction = self.g[i] * y[i + 1];
            y[i] = y[i] - correction;
        }
        y
    }
}

/// O(n) solve: band elimination plus Woodbury correction for the two corner
/// blocks `A[0, n-1] = lower[0]` and `A[n-1, 0] = upper[n-1]`.
pub(crate) fn solve_banded(sys: &CyclicBlockTridiagonalSystem, cap: f64) -> Result<Vec<Vec2>> {
    let n = sys.n();
    if n < 3 {
        return solve_dense(sys, cap);
    }
    let factor = BandFactor::new(sys, cap)?;
    let y = factor.solve_vec(sys, &sys.rhs);
    // A = T + W Z^T with W carrying identities at blocks 0 and n-1 and Z^T
    // carrying the corner blocks; columns of G = T^-1 W
    let g_first = factor.solve_unit(sys, 0);
    let g_last = factor.solve_unit(sys, n - 1);
    let corner_low = sys.lower[0]; // couples row 0 to column n-1
    let corner_up = sys.upper[n - 1]; // couples row n-1 to column 0

    // capacitance matrix M = I_4 + Z^T G, right-hand side Z^T y
    let m11 = Mat2::IDENTITY + corner_low * g_first[n - 1];
    let m12 = corner_low * g_last[n - 1];
    let m21 = corner_up * g_first[0];
    let m22 = Mat2::IDENTITY + corner_up * g_last[0];
    let d1 = corner_low * y[n - 1];
    let d2 = corner_up * y[0];
    let c = solve4(
        [
            [m11.a, m11.b, m12.a, m12.b],
            [m11.c, m11.d, m12.c, m12.d],
            [m21.a, m21.b, m22.a, m22.b],
            [m21.c, m21.d, m22.c, m22.d],
        ],
        [d1.x, d1.y, d2.x, d2.y],
    )
    .ok_or(Error::SingularSystem { block: n })?;
    let c1 = Vec2::new(c[0], c[1]);
    let c2 = Vec2::new(c[2], c[3]);
    Ok((0..n).map(|i| y[i] - g_first[i] * c1 - g_last[i] * c2).collect())
}

/// 4x4 dense solve with partial pivoting; `None` on a vanishing pivot.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let mut acc = b[row];
        for k in row + 1..4 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Dense Gaussian elimination with partial pivoting on the full 2n x 2n
/// matrix. Reference path for small systems.
pub(crate) fn solve_dense(sys: &CyclicBlockTridiagonalSystem, _cap: f64) -> Result<Vec<Vec2>> {
    let n = sys.n();
    let dim = 2 * n;
    let mut a = vec![0.0f64; dim * dim];
    let put = |row: usize, col: usize, m: Mat2, a: &mut [f64]| {
        a[2 * row * dim + 2 * col] += m.a;
        a[2 * row * dim + 2 * col + 1] += m.b;
        a[(2 * row + 1) * dim + 2 * col] += m.c;
        a[(2 * row + 1) * dim + 2 * col + 1] += m.d;
    };
    for j in 0..n {
        put(j, j, sys.diag[j], &mut a);
        put(j, (j + 1) % n, sys.upper[j], &mut a);
        put(j, (j + n - 1) % n, sys.lower[j], &mut a);
    }
    let mut b: Vec<f64> = sys.rhs.iter().flat_map(|v| [v.x, v.y]).collect();

    for col in 0..dim {
        let piv = (col..dim)
            .max_by(|&i, &j| a[i * dim + col].abs().total_cmp(&a[j * dim + col].abs()))
            .unwrap();
        if a[piv * dim + col] == 0.0 {
            return Err(Error::SingularSystem { block: col / 2 });
        }
        if piv != col {
            for k in 0..dim {
                a.swap(col * dim + k, piv * dim + k);
            }
            b.swap(col, piv);
        }
        for row in col + 1..dim {
            let f = a[row * dim + col] / a[col * dim + col];
            if f == 0.0 {
                continue;
            }
            for k in col..dim {
                a[row * dim + k] -= f * a[col * dim + k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0f64; dim];
    for row in (0..dim).rev() {
        let mut acc = b[row];
        for k in row + 1..dim {
            acc -= a[row * dim + k] * x[k];
        }
        x[row] = acc / a[row * dim + row];
    }
    Ok((0..n).map(|j| Vec2::new(x[2 * j], x[2 * j + 1])).collect())
}
