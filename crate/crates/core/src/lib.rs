//! Randomized (qDRIFT) simulation of closed and Markovian open quantum systems.
//!
//! The crate covers the whole pipeline from generator decomposition to error
//! certification:
//!
//! * [`tensor`]: dense complex matrices, Kronecker products, Padé exponentials,
//!   Hermitian eigensolver, trace norms.
//! * [`channels`]: superoperators in the column-stacked representation,
//!   commutator and dissipator generators, Choi matrices, CPTP checks.
//! * [`models`]: Pauli strings, generator decompositions, the dephasing
//!   transverse-field Ising model and the Pauli data-encoding Hamiltonian.
//! * [`norms`]: diamond-norm sandwich bounds, see-saw lower bound, analytic
//!   per-term norm bounds.
//! * [`qdrift`]: mixture channel, seeded trajectory sampling, step-count
//!   estimators and dense bound verification.

pub mod channels;
pub mod error;
pub mod exact;
pub mod models;
pub mod norms;
pub mod qdrift;
pub mod random;
pub mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use tensor::ComplexMatrix;
