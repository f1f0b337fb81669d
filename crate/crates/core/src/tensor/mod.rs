//! Dense complex linear algebra: products, Kronecker products, exponentials,
//! Hermitian eigendecomposition, and trace norms.
//!
//! Vectorization is column-stacking throughout, so `vec(A·X·B) = (Bᵀ ⊗ A)·vec(X)`.

mod eigen;
mod expm;
mod matrix;

use num_complex::Complex64;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, HermitianEigen, JACOBI_TOL};
pub use expm::{matrix_exp, solve, THETA_13};
pub use matrix::{max_dense_dim, ComplexMatrix, DEFAULT_MAX_DIM, MAX_DIM_ENV};

use crate::error::Result;

/// Inputs whose Hermiticity defect is below this (relative to their largest
/// entry) take the eigenvalue path in [`trace_norm`].
const HERMITIAN_FAST_PATH: f64 = 1e-13;

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.kron(b)
}

/// Kronecker product of a sequence of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> Result<ComplexMatrix> {
    let mut acc = ComplexMatrix::identity(1);
    for f in factors {
        acc = acc.kron(f)?;
    }
    Ok(acc)
}

pub fn vec(x: &ComplexMatrix) -> ComplexMatrix {
    x.vec()
}

pub fn unvec(v: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    ComplexMatrix::unvec(v, d)
}

/// Singular values in descending order, from the eigenvalues of `A†A`.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let gram = if a.rows() >= a.cols() { &a.adjoint() * a } else { a * &a.adjoint() };
    let mut sv: Vec<f64> = hermitian_eigenvalues(&gram)?.into_iter().map(|x| x.max(0.0).sqrt()).collect();
    sv.reverse();
    Ok(sv)
}

/// Largest singular value.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    if a.is_square() && a.hermiticity_defect() <= HERMITIAN_FAST_PATH * a.max_abs() {
        let ev = hermitian_eigenvalues(a)?;
        return Ok(ev.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    }
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

/// Sum of singular values.
///
/// Hermitian input (the common case: Choi matrices of Hermiticity-preserving
/// maps) is handled through its own eigenvalues, which avoids the square-root
/// precision floor of the `A†A` route.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    if a.is_square() && a.hermiticity_defect() <= HERMITIAN_FAST_PATH * a.max_abs() {
        return Ok(hermitian_eigenvalues(a)?.iter().map(|x| x.abs()).sum());
    }
    Ok(singular_values(a)?.iter().sum())
}

/// Outer product `u v†`.
pub fn outer(u: &[Complex64], v: &[Complex64]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(u.len(), v.len());
    for (i, a) in u.iter().enumerate() {
        for (j, b) in v.iter().enumerate() {
            m[(i, j)] = a * b.conj();
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_norm_of_diagonal() {
        let d = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -2.0]]).unwrap();
        assert!((trace_norm(&d).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn trace_norm_of_sigma_x() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert!((trace_norm(&x).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn trace_norm_of_non_hermitian_uses_singular_values() {
        // [[0, 2], [0, 0]] has singular values 2, 0.
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!((trace_norm(&m).unwrap() - 2.0).abs() < 1e-15);
        assert!((spectral_norm(&m).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn trace_norm_of_rectangular() {
        let m = ComplexMatrix::from_real_rows(&[&[3.0, 0.0, 0.0], &[0.0, 0.0, 4.0]]).unwrap();
        assert!((trace_norm(&m).unwrap() - 7.0).abs() < 1e-14);
    }
}
