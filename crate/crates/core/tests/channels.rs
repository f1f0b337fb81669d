use num_complex::Complex64;
use proptest::prelude::*;
use qdrift_core::channels::{
    apply, channel_exp, choi, commutator_superop, compose_pow, dissipator_superop, is_cptp, Superoperator, CPTP_TOL,
};
use qdrift_core::models::{build_encoding_hamiltonian, build_tfim_dephasing, builtin_lattice, Pauli, PauliString};
use qdrift_core::random::{self, stream_rng};
use qdrift_core::tensor::ComplexMatrix;

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

fn naive_power(s: &Superoperator, n: usize) -> Superoperator {
    let mut acc = Superoperator::identity(s.dim());
    for _ in 0..n {
        acc = s.compose(&acc).unwrap();
    }
    acc
}

#[test]
fn compose_pow_matches_naive_products() {
    let mut rng = stream_rng(11, 0);
    let s = random::channel(3, 2, &mut rng).unwrap();
    for n in 0..=5u64 {
        let fast = compose_pow(&s, n).unwrap();
        let slow = naive_power(&s, n as usize);
        assert!(fast.matrix().max_abs_diff(slow.matrix()) < 1e-11, "n = {n}");
    }
}

#[test]
fn superoperators_act_like_their_formulas() {
    let mut rng = stream_rng(12, 0);
    let h = random::hermitian(3, &mut rng);
    let l = random::gaussian_matrix(3, 3, &mut rng);
    let x = random::gaussian_matrix(3, 3, &mut rng);

    let comm = commutator_superop(&h).unwrap().apply_operator(&x).unwrap();
    let expected = (&(&h * &x) - &(&x * &h)).scale(-i());
    assert!(comm.max_abs_diff(&expected) < 1e-13);

    let ldl = l.adjoint().matmul(&l).unwrap();
    let diss = dissipator_superop(&l).unwrap().apply_operator(&x).unwrap();
    let anti = &(&ldl * &x) + &(&x * &ldl);
    let expected = &(&(&l * &x) * &l.adjoint()) - &anti.scale_real(0.5);
    assert!(diss.max_abs_diff(&expected) < 1e-12);
}

/// `L(ρ) = −i[H, ρ] + γ Σ_s (Z_s ρ Z_s − ρ)` with `H = −J Σ Z_aZ_b − h Σ X_s`,
/// assembled directly from the Pauli matrices.
fn direct_tfim(spins: usize, edges: &[(usize, usize)], j: f64, h: f64, gamma: f64, rho: &ComplexMatrix) -> ComplexMatrix {
    let op = |sites: &[(usize, Pauli)]| PauliString::on_sites(spins, sites).unwrap().matrix().unwrap();
    let d = 1 << spins;
    let mut ham = ComplexMatrix::zeros(d, d);
    for &(a, b) in edges {
        ham -= &op(&[(a, Pauli::Z), (b, Pauli::Z)]).scale_real(j);
    }
    for s in 0..spins {
        ham -= &op(&[(s, Pauli::X)]).scale_real(h);
    }
    let mut out = (&(&ham * rho) - &(rho * &ham)).scale(-i());
    for s in 0..spins {
        let z = op(&[(s, Pauli::Z)]);
        out += &(&(&(&z * rho) * &z) - rho).scale_real(gamma);
    }
    out
}

#[test]
fn tfim_generator_matches_direct_assembly() {
    for (spins, j, h, gamma) in [(2, 1.0, 0.5, 0.1), (2, -0.7, 1.3, 0.25), (4, 0.4, -0.9, 0.05)] {
        let lattice = builtin_lattice(spins).unwrap();
        let decomp = build_tfim_dephasing(&lattice, j, h, gamma).unwrap();
        let gen = decomp.generator().unwrap();
        let rho = random::density_matrix(1 << spins, &mut stream_rng(13, spins as u64));
        let ours = gen.apply_operator(rho.matrix()).unwrap();
        let direct = direct_tfim(spins, lattice.edges(), j, h, gamma, rho.matrix());
        assert!(ours.max_abs_diff(&direct) < 1e-12, "spins = {spins}");
    }
}

#[test]
fn single_qubit_dephasing_decays_coherences() {
    // exp(τ γ D_Z) multiplies off-diagonals by e^{−2γτ}.
    let gen = dissipator_superop(&Pauli::Z.matrix()).unwrap().scale(0.3);
    let e = channel_exp(&gen, 2.0).unwrap();
    let rho = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
    let out = e.apply_operator(&rho).unwrap();
    assert!((out[(0, 1)].re - 0.5 * (-1.2f64).exp()).abs() < 1e-14);
    assert!((out[(0, 0)].re - 0.5).abs() < 1e-14);
}

#[test]
fn builder_generators_exponentiate_to_channels() {
    let mut decomps = Vec::new();
    for spins in [2, 4] {
        decomps.push(build_tfim_dephasing(&builtin_lattice(spins).unwrap(), 1.0, 0.5, 0.1).unwrap());
        decomps.push(build_tfim_dephasing(&builtin_lattice(spins).unwrap(), -2.0, 0.3, 1.0).unwrap());
    }
    decomps.push(build_encoding_hamiltonian(&[0.3, -0.8, 0.1, 0.5]).unwrap());
    decomps.push(build_encoding_hamiltonian(&[1.0, -1.0, 0.2, 0.7, -0.4, 0.9, 0.05]).unwrap());
    for decomp in &decomps {
        let gen = decomp.generator().unwrap();
        for tau in [0.01, 0.1, 1.0] {
            let report = is_cptp(&channel_exp(&gen, tau).unwrap(), CPTP_TOL).unwrap();
            assert!(report.is_cptp, "τ = {tau}: {report:?}");
            for term in decomp.terms() {
                let report = is_cptp(&channel_exp(&term.superop().unwrap(), tau).unwrap(), CPTP_TOL).unwrap();
                assert!(report.is_cptp, "{} at τ = {tau}", term.label);
            }
        }
    }
}

#[test]
fn non_channels_are_rejected() {
    let transpose = {
        let mut m = ComplexMatrix::zeros(4, 4);
        for a in 0..2 {
            for b in 0..2 {
                m[(a * 2 + b, b * 2 + a)] = Complex64::new(1.0, 0.0);
            }
        }
        Superoperator::new(2, m).unwrap()
    };
    let report = is_cptp(&transpose, CPTP_TOL).unwrap();
    assert!(!report.is_cptp);
    assert!((report.min_eigenvalue + 0.5).abs() < 1e-12);
    assert!(!is_cptp(&Superoperator::identity(2).scale(1.5), CPTP_TOL).unwrap().is_cptp);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn choi_is_linear(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let mut rng = stream_rng(seed, 0);
        let s = random::channel(2, 3, &mut rng).unwrap();
        let t = random::channel(2, 1, &mut rng).unwrap();
        let combo = &s.scale(a) + &t.scale(b);
        let expected = &choi(&s).matrix().scale_real(a) + &choi(&t).matrix().scale_real(b);
        prop_assert!(choi(&combo).matrix().max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn compose_pow_is_additive(seed in any::<u64>(), m in 0u64..6, n in 0u64..6) {
        let s = random::channel(2, 2, &mut stream_rng(seed, 1)).unwrap();
        let lhs = compose_pow(&s, m + n).unwrap();
        let rhs = compose_pow(&s, m).unwrap().compose(&compose_pow(&s, n).unwrap()).unwrap();
        prop_assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-12);
    }

    #[test]
    fn channels_preserve_trace(seed in any::<u64>(), d in 2usize..5, k in 1usize..4) {
        let mut rng = stream_rng(seed, 2);
        let s = random::channel(d, k, &mut rng).unwrap();
        let rho = random::density_matrix(d, &mut rng);
        let out = apply(&s, &rho).unwrap();
        prop_assert!((out.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        prop_assert!(is_cptp(&s, CPTP_TOL).unwrap().is_cptp);
    }
}
