//! Matrix exponential via degree-13 Padé approximation with scaling and squaring.

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Padé(13) numerator coefficients `b_0 .. b_13`.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the unscaled degree-13 approximant is accurate to unit roundoff.
pub const THETA_13: f64 = 5.371920351148152;

/// `exp(a)` for a square matrix.
pub fn matrix_exp(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.require_square("matrix_exp input")?;
    let norm = a.norm_one();
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let squarings = if norm > THETA_13 { (norm / THETA_13).log2().ceil() as i32 } else { 0 };
    let scaled = a.scale_real(2f64.powi(-squarings));

    let b = |k: usize| Complex64::new(PADE13[k], 0.0);
    let ident = ComplexMatrix::identity(n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let combo = |terms: &[(usize, &ComplexMatrix)]| {
        let mut acc = ComplexMatrix::zeros(n, n);
        for &(k, m) in terms {
            for (o, &x) in acc.data_mut().iter_mut().zip(m.data()) {
                *o += b(k) * x;
            }
        }
        acc
    };

    let u_inner = &a6 * &combo(&[(13, &a6), (11, &a4), (9, &a2)]);
    let u_inner = &u_inner + &combo(&[(7, &a6), (5, &a4), (3, &a2), (1, &ident)]);
    let u = &scaled * &u_inner;
    let v = &a6 * &combo(&[(12, &a6), (10, &a4), (8, &a2)]);
    let v = &v + &combo(&[(6, &a6), (4, &a4), (2, &a2), (0, &ident)]);

    let mut result = solve(&(&v - &u), &(&v + &u))?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    if !result.is_finite() {
        return Err(Error::Domain("matrix exponential overflowed".into()));
    }
    Ok(result)
}

/// Solves `a · x = b` by LU decomposition with partial pivoting.
pub fn solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.require_square("solve lhs")?;
    if b.rows() != n {
        return Err(crate::error::shape("solve rhs row count mismatch"));
    }
    let m = b.cols();
    let mut lu = a.clone();
    let mut x = b.clone();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| lu[(i, col)].norm().total_cmp(&lu[(j, col)].norm()))
            .expect("non-empty range");
        if lu[(pivot, col)].norm() <= scale * f64::EPSILON * 1e-3 {
            return Err(Error::Singular);
        }
        if pivot != col {
            swap_rows(&mut lu, pivot, col);
            swap_rows(&mut x, pivot, col);
        }
        let inv = lu[(col, col)].inv();
        for row in col + 1..n {
            let factor = lu[(row, col)] * inv;
            if factor.re == 0.0 && factor.im == 0.0 {
                continue;
            }
            lu[(row, col)] = Complex64::new(0.0, 0.0);
            for k in col + 1..n {
                let delta = factor * lu[(col, k)];
                lu[(row, k)] -= delta;
            }
            for k in 0..m {
                let delta = factor * x[(col, k)];
                x[(row, k)] -= delta;
            }
        }
    }
    for col in (0..n).rev() {
        let inv = lu[(col, col)].inv();
        for k in 0..m {
            let mut acc = x[(col, k)];
            for j in col + 1..n {
                acc -= lu[(col, j)] * x[(j, k)];
            }
            x[(col, k)] = acc * inv;
        }
    }
    Ok(x)
}

fn swap_rows(m: &mut ComplexMatrix, a: usize, b: usize) {
    let cols = m.cols();
    let (lo, hi) = (a.min(b), a.max(b));
    let data = m.data_mut();
    let (head, tail) = data.split_at_mut(hi * cols);
    head[lo * cols..(lo + 1) * cols].swap_with_slice(&mut tail[..cols]);
}
