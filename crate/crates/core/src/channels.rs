//! Superoperators in the natural (column-stacked) representation.
//!
//! A map `Φ` on `d×d` operators is stored as the `d²×d²` matrix `S` with
//! `vec(Φ(X)) = S·vec(X)`. Composition is matrix multiplication, the adjoint
//! map (with respect to the Hilbert-Schmidt inner product) is `S†`, and the
//! Choi matrix puts the map on the first tensor factor:
//! `J = (Φ ⊗ id)(|Ω⟩⟨Ω|)` with `|Ω⟩ = Σᵢ|ii⟩/√d`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, shape, Error, Result};
use crate::tensor::{self, hermitian_eigenvalues, ComplexMatrix};

/// Default tolerance for [`is_cptp`].
pub const CPTP_TOL: f64 = 1e-9;

/// Tolerance used when checking that a Hamiltonian is Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A validated `d×d` density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub const HERMITIAN_TOL: f64 = 1e-12;
    pub const TRACE_TOL: f64 = 1e-12;
    pub const EIGEN_TOL: f64 = 1e-10;

    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        matrix.require_square("density matrix")?;
        let defect = matrix.hermiticity_defect();
        if defect > Self::HERMITIAN_TOL {
            return Err(domain(format!("density matrix not Hermitian (defect {defect:e})")));
        }
        let tr = matrix.trace();
        if (tr - c(1.0, 0.0)).norm() > Self::TRACE_TOL {
            return Err(domain(format!("density matrix trace {tr} differs from 1")));
        }
        let min = hermitian_eigenvalues(&matrix)?.first().copied().unwrap_or(0.0);
        if min < -Self::EIGEN_TOL {
            return Err(domain(format!("density matrix has negative eigenvalue {min:e}")));
        }
        Ok(Self { matrix })
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(domain(format!("state vector has norm {norm}")));
        }
        Self::new(tensor::outer(psi, psi))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}

/// Linear map on `d×d` matrices, stored as a `d²×d²` matrix acting on `vec(ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn new(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        if dim == 0 {
            return Err(shape("superoperator dimension must be positive"));
        }
        let sq = dim * dim;
        if matrix.rows() != sq || matrix.cols() != sq {
            return Err(shape(format!(
                "superoperator on d={dim} needs a {sq}x{sq} matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { dim, matrix })
    }

    /// Infers `d` from a square `d²×d²` matrix.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.require_square("superoperator matrix")?;
        let dim = (n as f64).sqrt().round() as usize;
        Self::new(dim, matrix)
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, matrix: ComplexMatrix::identity(dim * dim) }
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, matrix: ComplexMatrix::zeros(dim * dim, dim * dim) }
    }

    /// `ρ ↦ Σ Kᵢ ρ Kᵢ†`, i.e. `Σ K̄ᵢ ⊗ Kᵢ`.
    pub fn from_kraus(ops: &[ComplexMatrix]) -> Result<Self> {
        let first = ops.first().ok_or_else(|| shape("at least one Kraus operator required"))?;
        let dim = first.require_square("Kraus operator")?;
        let mut acc = ComplexMatrix::zeros(dim * dim, dim * dim);
        for k in ops {
            if k.rows() != dim || k.cols() != dim {
                return Err(shape("Kraus operators must share one square shape"));
            }
            acc += &k.conj().kron(k)?;
        }
        Ok(Self { dim, matrix: acc })
    }

    /// Unitary conjugation `ρ ↦ U ρ U†`.
    pub fn conjugation(u: &ComplexMatrix) -> Result<Self> {
        Self::from_kraus(std::slice::from_ref(u))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, matrix: self.matrix.scale_real(s) }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self { dim: self.dim, matrix: self.matrix.matmul(&other.matrix)? })
    }

    /// The Hilbert-Schmidt adjoint map, `S†`.
    pub fn adjoint(&self) -> Self {
        Self { dim: self.dim, matrix: self.matrix.adjoint() }
    }

    /// Applies the map to an arbitrary `d×d` operator.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.dim || x.cols() != self.dim {
            return Err(shape(format!(
                "operator {}x{} does not match superoperator dimension {}",
                x.rows(),
                x.cols(),
                self.dim
            )));
        }
        let out = self.matrix.mul_vec(&x.vec_entries())?;
        ComplexMatrix::unvec_entries(&out, self.dim)
    }

    /// `(Φ ⊗ id)(X)` for `X` on the doubled space (system factor first).
    pub fn apply_extended(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = self.dim;
        if x.rows() != d * d || x.cols() != d * d {
            return Err(shape("extended operator must be d²×d²"));
        }
        let mut out = ComplexMatrix::zeros(d * d, d * d);
        let mut block = vec![c(0.0, 0.0); d * d];
        for a in 0..d {
            for b in 0..d {
                // Column-stacked block X_ab[k, l] = X[(k, a), (l, b)].
                for l in 0..d {
                    for k in 0..d {
                        block[l * d + k] = x[(k * d + a, l * d + b)];
                    }
                }
                let mapped = self.matrix.mul_vec(&block)?;
                for j in 0..d {
                    for i in 0..d {
                        out[(i * d + a, j * d + b)] = mapped[j * d + i];
                    }
                }
            }
        }
        Ok(out)
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(shape(format!("superoperator dimensions {} and {} differ", self.dim, other.dim)));
        }
        Ok(())
    }
}

impl Add for &Superoperator {
    type Output = Superoperator;

    fn add(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!(self.dim, rhs.dim, "superoperator dimension mismatch");
        Superoperator { dim: self.dim, matrix: &self.matrix + &rhs.matrix }
    }
}

impl Sub for &Superoperator {
    type Output = Superoperator;

    fn sub(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!(self.dim, rhs.dim, "superoperator dimension mismatch");
        Superoperator { dim: self.dim, matrix: &self.matrix - &rhs.matrix }
    }
}

impl Mul for &Superoperator {
    type Output = Superoperator;

    fn mul(self, rhs: &Superoperator) -> Superoperator {
        self.compose(rhs).expect("superoperator dimension mismatch")
    }
}

/// Choi matrix with trace-one normalization for trace-preserving maps.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Traces out the first (output) factor.
    pub fn partial_trace_output(&self) -> ComplexMatrix {
        partial_trace_first(&self.matrix, self.dim)
    }
}

/// `ρ ↦ −i[H, ρ]`, i.e. `−i(I⊗H − Hᵀ⊗I)`.
pub fn commutator_superop(h: &ComplexMatrix) -> Result<Superoperator> {
    let d = h.require_square("Hamiltonian")?;
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL {
        return Err(domain(format!("Hamiltonian is not Hermitian (defect {defect:e})")));
    }
    let id = ComplexMatrix::identity(d);
    let left = id.kron(h)?;
    let right = h.transpose().kron(&id)?;
    Superoperator::new(d, (&left - &right).scale(c(0.0, -1.0)))
}

/// `ρ ↦ LρL† − ½{L†L, ρ}`, i.e. `L̄⊗L − ½ I⊗L†L − ½ (L†L)ᵀ⊗I`.
pub fn dissipator_superop(l: &ComplexMatrix) -> Result<Superoperator> {
    let d = l.require_square("jump operator")?;
    let id = ComplexMatrix::identity(d);
    let ldl = &l.adjoint() * l;
    let mut m = l.conj().kron(l)?;
    m -= &id.kron(&ldl)?.scale_real(0.5);
    m -= &ldl.transpose().kron(&id)?.scale_real(0.5);
    Superoperator::new(d, m)
}

/// `exp(τ·G)` for `τ ≥ 0`.
pub fn channel_exp(generator: &Superoperator, tau: f64) -> Result<Superoperator> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(domain(format!("channel time must be finite and nonnegative, got {tau}")));
    }
    if tau == 0.0 {
        return Ok(Superoperator::identity(generator.dim));
    }
    let m = tensor::matrix_exp(&generator.matrix.scale_real(tau))?;
    Superoperator::new(generator.dim, m)
}

/// `J[(i,a),(j,b)] = Φ(|a⟩⟨b|)[i,j] / d`.
pub fn choi(s: &Superoperator) -> ChoiMatrix {
    let d = s.dim;
    let inv_d = 1.0 / d as f64;
    let mut j_mat = ComplexMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            let col = b * d + a;
            for j in 0..d {
                for i in 0..d {
                    j_mat[(i * d + a, j * d + b)] = s.matrix[(j * d + i, col)] * inv_d;
                }
            }
        }
    }
    ChoiMatrix { dim: d, matrix: j_mat }
}

/// Partial trace over the first factor of a `d²×d²` operator.
pub fn partial_trace_first(m: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            out[(a, b)] = (0..d).map(|i| m[(i * d + a, i * d + b)]).sum();
        }
    }
    out
}

/// Which CPTP condition failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CptpFailure {
    NotHermitian,
    NotPositive,
    NotTracePreserving,
}

/// Outcome of [`is_cptp`] with the measured deviations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CptpReport {
    pub is_cptp: bool,
    pub tol: f64,
    pub min_eigenvalue: f64,
    pub hermiticity_defect: f64,
    /// Max entrywise deviation of the output-traced Choi matrix from `I/d`.
    pub trace_deviation: f64,
    pub failures: Vec<CptpFailure>,
}

/// Complete positivity via the Choi spectrum, trace preservation via its
/// partial trace over the output factor.
pub fn is_cptp(s: &Superoperator, tol: f64) -> Result<CptpReport> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(domain("CPTP tolerance must be positive"));
    }
    let d = s.dim;
    let j = choi(s);
    let hermiticity_defect = j.matrix.hermiticity_defect();
    let min_eigenvalue = hermitian_eigenvalues(&j.matrix)?.first().copied().unwrap_or(0.0);
    let reduced = j.partial_trace_output();
    let target = ComplexMatrix::identity(d).scale_real(1.0 / d as f64);
    let trace_deviation = reduced.max_abs_diff(&target);

    let mut failures = Vec::new();
    if hermiticity_defect > tol {
        failures.push(CptpFailure::NotHermitian);
    }
    if min_eigenvalue < -tol {
        failures.push(CptpFailure::NotPositive);
    }
    if trace_deviation > tol {
        failures.push(CptpFailure::NotTracePreserving);
    }
    Ok(CptpReport {
        is_cptp: failures.is_empty(),
        tol,
        min_eigenvalue,
        hermiticity_defect,
        trace_deviation,
        failures,
    })
}

/// `Sᴺ` by repeated squaring; `N = 0` gives the identity map.
pub fn compose_pow(s: &Superoperator, n: u64) -> Result<Superoperator> {
    let mut result: Option<ComplexMatrix> = None;
    let mut base = s.matrix.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => r.matmul(&base)?,
            });
        }
        e >>= 1;
        if e > 0 {
            base = base.matmul(&base)?;
        }
    }
    Ok(match result {
        None => Superoperator::identity(s.dim),
        Some(m) => Superoperator { dim: s.dim, matrix: m },
    })
}

/// `unvec(S · vec(ρ))`.
pub fn apply(s: &Superoperator, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    if rho.dim() != s.dim {
        return Err(Error::Shape(format!(
            "state dimension {} does not match superoperator dimension {}",
            rho.dim(),
            s.dim
        )));
    }
    s.apply_operator(rho.matrix())
}
