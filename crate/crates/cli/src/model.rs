use qdrift_core::models::{
    build_encoding_hamiltonian, build_tfim_dephasing, builtin_lattice, encoding_qubits, GeneratorDecomposition,
    GeneratorTerm, Pauli,
};
use qdrift_core::random::{data_vector, stream_rng, DataDistribution};

use crate::args::{ModelArgs, ModelKind};
use crate::error::{usage, CliResult};

pub const DEFAULT_SPINS: usize = 2;
pub const DEFAULT_COUPLING: f64 = 1.0;
pub const DEFAULT_FIELD: f64 = 0.5;
pub const DEFAULT_DEPHASING: f64 = 0.1;
pub const DEFAULT_MODEL_N: usize = 4;

const MAX_REDRAWS: u64 = 64;

/// A decomposition with a short description for logs.
pub struct NamedModel {
    pub label: String,
    pub decomp: GeneratorDecomposition,
}

pub fn parse_dist(dist: Option<&str>) -> CliResult<DataDistribution> {
    dist.unwrap_or("uniform-pm1").parse().map_err(|e: qdrift_core::Error| usage(e.to_string()))
}

/// Data vector of length `n` drawn from stream `n` of `seed`. An all-zero
/// draw (possible for tiny `n`) is replaced by a draw from the next stream
/// block.
pub fn encoding_data(n: usize, dist: DataDistribution, seed: u64) -> CliResult<Vec<f64>> {
    if n == 0 {
        return Err(usage("data length must be at least 1"));
    }
    for attempt in 0..MAX_REDRAWS {
        let stream = n as u64 + (attempt << 32);
        let x = data_vector(n, dist, &mut stream_rng(seed, stream));
        if x.iter().any(|&v| v != 0.0) {
            return Ok(x);
        }
        eprintln!("note: all-zero data vector for N = {n} (stream {stream}), redrawing");
    }
    Err(usage(format!("no nonzero data vector for N = {n} after {MAX_REDRAWS} draws")))
}

pub fn encoding_model(n: usize, dist: DataDistribution, seed: u64) -> CliResult<NamedModel> {
    let x = encoding_data(n, dist, seed)?;
    Ok(NamedModel {
        label: format!("encoding N={n} l={} dist={dist}", encoding_qubits(n)),
        decomp: build_encoding_hamiltonian(&x)?,
    })
}

fn one_qubit(terms: &[(f64, Pauli, &str)]) -> CliResult<GeneratorDecomposition> {
    let terms = terms
        .iter()
        .map(|&(lambda, p, label)| GeneratorTerm::hamiltonian(lambda, p.matrix(), label))
        .collect::<qdrift_core::Result<Vec<_>>>()?;
    Ok(GeneratorDecomposition::new(2, terms)?)
}

/// Decompositions selected by `args`; `kind` has already been resolved.
pub fn build_models(kind: ModelKind, args: &ModelArgs, seed: u64) -> CliResult<Vec<NamedModel>> {
    match kind {
        ModelKind::Tfim => {
            let j = args.coupling.unwrap_or(DEFAULT_COUPLING);
            let h = args.field.unwrap_or(DEFAULT_FIELD);
            let gamma = args.dephasing.unwrap_or(DEFAULT_DEPHASING);
            let spins = args.spins.clone().unwrap_or_else(|| vec![DEFAULT_SPINS]);
            if spins.is_empty() {
                return Err(usage("--spins needs at least one value"));
            }
            spins
                .into_iter()
                .map(|s| {
                    let lattice = builtin_lattice(s).map_err(|e| usage(e.to_string()))?;
                    Ok(NamedModel {
                        label: format!("tfim spins={s} J={j} h={h} gamma={gamma}"),
                        decomp: build_tfim_dephasing(&lattice, j, h, gamma)?,
                    })
                })
                .collect()
        }
        ModelKind::SingleTerm => {
            Ok(vec![NamedModel { label: "single-term".into(), decomp: one_qubit(&[(1.0, Pauli::X, "x")])? }])
        }
        ModelKind::TwoTerm => Ok(vec![NamedModel {
            label: "two-term".into(),
            decomp: one_qubit(&[(0.7, Pauli::X, "x"), (0.3, Pauli::Z, "z")])?,
        }]),
        ModelKind::Encoding => {
            let dist = parse_dist(args.dist.as_deref())?;
            let ns = args.n.clone().unwrap_or_else(|| vec![DEFAULT_MODEL_N]);
            ns.into_iter().map(|n| encoding_model(n, dist, seed)).collect()
        }
        ModelKind::Raw => Err(usage("the raw model has no decomposition; it is only available to estimate")),
    }
}

/// Exactly one decomposition, for commands without a model column.
pub fn build_single(kind: ModelKind, args: &ModelArgs, seed: u64) -> CliResult<NamedModel> {
    let mut models = build_models(kind, args, seed)?;
    if models.len() != 1 {
        return Err(usage("this command takes a single model (one --spins or --n value)"));
    }
    Ok(models.remove(0))
}
