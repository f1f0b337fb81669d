//! Generator decompositions `L = Σ λ_k L_k` with `λ_k ≥ 0`, and the builders
//! for the models studied with qDRIFT: the transverse-field Ising model with
//! local dephasing, and the Pauli-string encoding of a classical data vector.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::Serialize;

use crate::channels::{commutator_superop, dissipator_superop, Superoperator};
use crate::error::{domain, shape, Error, Result};
use crate::exact;
use crate::tensor::{self, max_dense_dim, ComplexMatrix};

/// Tolerance for Hermiticity and unit spectral norm of Hamiltonian payloads.
pub const PAYLOAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> ComplexMatrix {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let rows = match self {
            Pauli::I => [[one, z], [z, one]],
            Pauli::X => [[z, one], [one, z]],
            Pauli::Y => [[z, -i], [i, z]],
            Pauli::Z => [[one, z], [z, -one]],
        };
        ComplexMatrix::from_vec(2, 2, rows.concat()).expect("2x2 Pauli")
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Signed tensor product of single-qubit Paulis; qubit 0 is the leftmost
/// (most significant) Kronecker factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
    negative: bool,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(shape("a Pauli string needs at least one qubit"));
        }
        Ok(Self { letters, negative: false })
    }

    /// `letter` on `site`, identity elsewhere.
    pub fn single(qubits: usize, site: usize, letter: Pauli) -> Result<Self> {
        Self::on_sites(qubits, &[(site, letter)])
    }

    pub fn on_sites(qubits: usize, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut letters = vec![Pauli::I; qubits];
        for &(site, letter) in sites {
            if site >= qubits {
                return Err(shape(format!("site {site} outside {qubits} qubits")));
            }
            letters[site] = letter;
        }
        Self::new(letters)
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    /// Multiplies by the sign of `x` (`+1` for zero).
    pub fn signed_by(self, x: f64) -> Self {
        if x < 0.0 {
            self.negated()
        } else {
            self
        }
    }

    pub fn qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn sign(&self) -> f64 {
        if self.negative {
            -1.0
        } else {
            1.0
        }
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn dim(&self) -> usize {
        1usize << self.letters.len()
    }

    /// Dense `2ˡ×2ˡ` matrix, built from the phase-permutation structure.
    pub fn matrix(&self) -> Result<ComplexMatrix> {
        let l = self.letters.len();
        if l >= usize::BITS as usize - 1 || (1usize << l) > max_dense_dim() {
            return Err(Error::Size { what: "Pauli string", requested: l, limit: max_dense_dim() });
        }
        let d = 1usize << l;
        let mut flip = 0usize;
        for (q, &p) in self.letters.iter().enumerate() {
            if matches!(p, Pauli::X | Pauli::Y) {
                flip |= 1 << (l - 1 - q);
            }
        }
        let mut m = ComplexMatrix::zeros(d, d);
        for row in 0..d {
            let mut phase = Complex64::new(self.sign(), 0.0);
            for (q, &p) in self.letters.iter().enumerate() {
                let bit = (row >> (l - 1 - q)) & 1;
                match p {
                    Pauli::I | Pauli::X => {}
                    Pauli::Z if bit == 1 => phase = -phase,
                    Pauli::Z => {}
                    // Y = [[0, -i], [i, 0]]
                    Pauli::Y if bit == 0 => phase *= Complex64::new(0.0, -1.0),
                    Pauli::Y => phase *= Complex64::new(0.0, 1.0),
                }
            }
            m[(row, row ^ flip)] = phase;
        }
        Ok(m)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            write!(f, "-")?;
        }
        for p in &self.letters {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let letters = body
            .chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(domain(format!("invalid Pauli letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let p = Self::new(letters)?;
        Ok(if negative { p.negated() } else { p })
    }
}

/// The `index`-th (1-based) string in lexicographic order over `{I<X<Y<Z}^qubits`;
/// index 0 would be the all-identity string.
pub fn pauli_string_at(qubits: usize, index: u128) -> Result<PauliString> {
    let letters = (0..qubits)
        .map(|q| {
            let shift = 2 * (qubits - 1 - q);
            let digit = if shift >= 128 { 0 } else { (index >> shift) & 3 };
            Pauli::ALL[digit as usize]
        })
        .collect();
    PauliString::new(letters)
}

/// The first `count` non-identity strings on `qubits` qubits in lexicographic
/// order with `I < X < Y < Z`.
pub fn enumerate_pauli_strings(qubits: usize, count: usize) -> Result<Vec<PauliString>> {
    let available = if 2 * qubits >= 128 { u128::MAX } else { (1u128 << (2 * qubits)) - 1 };
    if count as u128 > available {
        return Err(domain(format!("only {available} non-identity strings exist on {qubits} qubits")));
    }
    (1..=count as u128).map(|i| pauli_string_at(qubits, i)).collect()
}

/// Operator payload of a generator term.
#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Pauli(PauliString),
    Dense(ComplexMatrix),
}

impl Operator {
    pub fn dim(&self) -> usize {
        match self {
            Operator::Pauli(p) => p.dim(),
            Operator::Dense(m) => m.rows(),
        }
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        match self {
            Operator::Pauli(p) => p.matrix(),
            Operator::Dense(m) => Ok(m.clone()),
        }
    }

    /// Operator norm; exactly 1 for Pauli strings.
    pub fn spectral_norm(&self) -> Result<f64> {
        match self {
            Operator::Pauli(_) => Ok(1.0),
            Operator::Dense(m) => tensor::spectral_norm(m),
        }
    }

    fn describe(&self) -> String {
        match self {
            Operator::Pauli(p) => p.to_string(),
            Operator::Dense(m) => format!("dense {}x{}", m.rows(), m.cols()),
        }
    }
}

impl From<PauliString> for Operator {
    fn from(p: PauliString) -> Self {
        Operator::Pauli(p)
    }
}

impl From<ComplexMatrix> for Operator {
    fn from(m: ComplexMatrix) -> Self {
        Operator::Dense(m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TermKind {
    /// `L_k(ρ) = −i[H_k, ρ]` with `‖H_k‖ = 1`.
    Hamiltonian(Operator),
    /// `L_k(ρ) = LρL† − ½{L†L, ρ}`.
    Dissipator(Operator),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorTerm {
    pub lambda: f64,
    pub kind: TermKind,
    pub label: String,
}

impl GeneratorTerm {
    /// Unitary term; the payload must be Hermitian with unit spectral norm.
    pub fn hamiltonian(lambda: f64, op: impl Into<Operator>, label: impl Into<String>) -> Result<Self> {
        check_lambda(lambda)?;
        let op = op.into();
        if let Operator::Dense(m) = &op {
            m.require_square("Hamiltonian payload")?;
            let defect = m.hermiticity_defect();
            if defect > PAYLOAD_TOL {
                return Err(domain(format!("Hamiltonian payload not Hermitian (defect {defect:e})")));
            }
            let norm = tensor::spectral_norm(m)?;
            if (norm - 1.0).abs() > PAYLOAD_TOL {
                return Err(domain(format!("Hamiltonian payload has spectral norm {norm}, expected 1")));
            }
        }
        Ok(Self { lambda, kind: TermKind::Hamiltonian(op), label: label.into() })
    }

    pub fn dissipator(lambda: f64, op: impl Into<Operator>, label: impl Into<String>) -> Result<Self> {
        check_lambda(lambda)?;
        let op = op.into();
        if let Operator::Dense(m) = &op {
            m.require_square("jump operator")?;
        }
        Ok(Self { lambda, kind: TermKind::Dissipator(op), label: label.into() })
    }

    pub fn operator(&self) -> &Operator {
        match &self.kind {
            TermKind::Hamiltonian(op) | TermKind::Dissipator(op) => op,
        }
    }

    pub fn dim(&self) -> usize {
        self.operator().dim()
    }

    pub fn is_hamiltonian(&self) -> bool {
        matches!(self.kind, TermKind::Hamiltonian(_))
    }

    /// The unweighted generator `L_k` as a superoperator.
    pub fn superop(&self) -> Result<Superoperator> {
        match &self.kind {
            TermKind::Hamiltonian(op) => commutator_superop(&op.matrix()?),
            TermKind::Dissipator(op) => dissipator_superop(&op.matrix()?),
        }
    }
}

impl fmt::Display for GeneratorTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.is_hamiltonian() { "H" } else { "D" };
        write!(f, "{} {}·{}[{}]", self.label, self.lambda, kind, self.operator().describe())
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(domain(format!("term coefficient must be finite and nonnegative, got {lambda}")));
    }
    Ok(())
}

/// `term_superop(term, d)`: the unweighted `L_k`, checked against dimension `d`.
pub fn term_superop(term: &GeneratorTerm, d: usize) -> Result<Superoperator> {
    if term.dim() != d {
        return Err(shape(format!("term {} acts on dimension {}, expected {d}", term.label, term.dim())));
    }
    term.superop()
}

/// `L = Σ λ_k L_k` on a `d`-dimensional system.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorDecomposition {
    dim: usize,
    terms: Vec<GeneratorTerm>,
}

impl GeneratorDecomposition {
    pub fn new(dim: usize, terms: Vec<GeneratorTerm>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.dim() != dim) {
            return Err(shape(format!("term {} acts on dimension {}, expected {dim}", t.label, t.dim())));
        }
        let decomp = Self { dim, terms };
        if decomp.gamma().is_nan() || decomp.gamma() <= 0.0 {
            return Err(domain("generator decomposition needs Γ = Σλ_k > 0"));
        }
        Ok(decomp)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[GeneratorTerm] {
        &self.terms
    }

    /// Number of terms `n`.
    pub fn n(&self) -> usize {
        self.terms.len()
    }

    /// `Γ = Σ λ_k` summed exactly over the decimal coefficients.
    pub fn gamma_exact(&self) -> BigRational {
        exact::decimal_sum(self.terms.iter().map(|t| t.lambda)).expect("finite coefficients")
    }

    pub fn gamma(&self) -> f64 {
        exact::to_f64(&self.gamma_exact())
    }

    /// `p_k = λ_k / Γ`.
    pub fn probabilities(&self) -> Vec<f64> {
        let gamma = self.gamma();
        self.terms.iter().map(|t| t.lambda / gamma).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.terms.iter().all(GeneratorTerm::is_hamiltonian)
    }

    /// The full generator `Σ λ_k L_k`.
    pub fn generator(&self) -> Result<Superoperator> {
        let mut acc = Superoperator::zero(self.dim);
        for t in &self.terms {
            acc = &acc + &t.superop()?.scale(t.lambda);
        }
        Ok(acc)
    }
}

/// `(Γ, p)` for a decomposition.
pub fn gamma_and_probs(decomp: &GeneratorDecomposition) -> Result<(f64, Vec<f64>)> {
    let gamma = decomp.gamma();
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(domain("Γ must be positive"));
    }
    Ok((gamma, decomp.probabilities()))
}

/// Interaction graph of a spin lattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeSpec {
    sites: usize,
    edges: Vec<(usize, usize)>,
}

impl LatticeSpec {
    pub fn new(sites: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if sites == 0 {
            return Err(domain("lattice needs at least one site"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(a, b) in &edges {
            if a >= sites || b >= sites {
                return Err(domain(format!("edge ({a}, {b}) outside {sites} sites")));
            }
            if a == b {
                return Err(domain(format!("self-loop on site {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(domain(format!("duplicate edge ({a}, {b})")));
            }
        }
        Ok(Self { sites, edges })
    }

    pub fn chain(sites: usize) -> Result<Self> {
        Self::new(sites, (1..sites).map(|i| (i - 1, i)).collect())
    }

    /// Open-boundary `rows × cols` grid, sites numbered row-major.
    pub fn grid(rows: usize, cols: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let s = r * cols + c;
                if c + 1 < cols {
                    edges.push((s, s + 1));
                }
                if r + 1 < rows {
                    edges.push((s, s + cols));
                }
            }
        }
        Self::new(rows * cols, edges)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// Chain of two, 2×2 grid, or 2×3 grid.
pub fn builtin_lattice(spins: usize) -> Result<LatticeSpec> {
    match spins {
        2 => LatticeSpec::chain(2),
        4 => LatticeSpec::grid(2, 2),
        6 => LatticeSpec::grid(2, 3),
        other => Err(domain(format!("no built-in lattice for {other} spins (supported: 2, 4, 6)"))),
    }
}

/// Transverse-field Ising model with local dephasing,
/// `L(ρ) = −i[−J Σ ZᵢZⱼ − h Σ Xⱼ, ρ] + γ Σ (ZⱼρZⱼ − ρ)`.
///
/// Coupling and field signs move into the Pauli payload so every `λ_k ≥ 0`;
/// zero coefficients drop their terms.
pub fn build_tfim_dephasing(lattice: &LatticeSpec, j: f64, h: f64, gamma: f64) -> Result<GeneratorDecomposition> {
    if !j.is_finite() || !h.is_finite() {
        return Err(domain("coupling and field must be finite"));
    }
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(domain(format!("dephasing rate must be nonnegative, got {gamma}")));
    }
    let n = lattice.sites();
    let mut terms = Vec::with_capacity(lattice.edges().len() + 2 * n);
    if j != 0.0 {
        for &(a, b) in lattice.edges() {
            let zz = PauliString::on_sites(n, &[(a, Pauli::Z), (b, Pauli::Z)])?.negated().signed_by(j);
            terms.push(GeneratorTerm::hamiltonian(j.abs(), zz, format!("zz({a},{b})"))?);
        }
    }
    if h != 0.0 {
        for s in 0..n {
            let x = PauliString::single(n, s, Pauli::X)?.negated().signed_by(h);
            terms.push(GeneratorTerm::hamiltonian(h.abs(), x, format!("x({s})"))?);
        }
    }
    if gamma != 0.0 {
        for s in 0..n {
            terms.push(GeneratorTerm::dissipator(gamma, PauliString::single(n, s, Pauli::Z)?, format!("dephase({s})"))?);
        }
    }
    if terms.is_empty() {
        return Err(domain("all TFIM coefficients are zero"));
    }
    let dim = 1usize.checked_shl(n as u32).ok_or_else(|| domain("too many sites"))?;
    GeneratorDecomposition::new(dim, terms)
}

/// `l = max(1, ⌈log₂ N⌉)`.
pub fn encoding_qubits(n: usize) -> usize {
    if n <= 2 {
        1
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// `H = Σ |xᵢ| · sign(xᵢ)Pᵢ` with `Pᵢ` the `i`-th non-identity Pauli string.
pub fn build_encoding_hamiltonian(x: &[f64]) -> Result<GeneratorDecomposition> {
    if x.is_empty() {
        return Err(domain("data vector is empty"));
    }
    if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
        return Err(domain(format!("data vector contains {bad}")));
    }
    if x.iter().all(|&v| v == 0.0) {
        return Err(domain("data vector is all zero (Γ = 0)"));
    }
    let l = encoding_qubits(x.len());
    let strings = enumerate_pauli_strings(l, x.len())?;
    let terms = x
        .iter()
        .zip(strings)
        .enumerate()
        .filter(|(_, (&v, _))| v != 0.0)
        .map(|(i, (&v, p))| GeneratorTerm::hamiltonian(v.abs(), p.signed_by(v), format!("x[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let dim = 1usize.checked_shl(l as u32).ok_or_else(|| domain("data vector too long"))?;
    GeneratorDecomposition::new(dim, terms)
}
