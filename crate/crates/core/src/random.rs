//! Seeded random objects: Gaussian matrices, Haar vectors and unitaries,
//! random states and random channels.
//!
//! Every generator is a pure function of `(seed, stream)`; distinct stream ids
//! give independent ChaCha streams for the same seed.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::Serialize;

use crate::channels::{DensityMatrix, Superoperator};
use crate::error::{domain, Error, Result};
use crate::tensor::ComplexMatrix;

/// Counter-based RNG for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn complex_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: rand::Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| complex_normal(rng)).collect();
    ComplexMatrix::from_vec(rows, cols, data).expect("finite gaussian entries")
}

/// Uniformly distributed unit vector in `Cⁿ`.
pub fn unit_vector<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n).map(|_| complex_normal(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Gaussian columns orthonormalized by modified Gram-Schmidt. The implied QR
/// factor has a positive diagonal, so a square input gives a Haar unitary.
pub fn isometry<R: rand::Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(cols <= rows, "isometry needs cols <= rows");
    loop {
        let g = gaussian_matrix(rows, cols, rng);
        let mut q = g.clone();
        let mut ok = true;
        for j in 0..cols {
            for k in 0..j {
                let dot: Complex64 = (0..rows).map(|i| q[(i, k)].conj() * q[(i, j)]).sum();
                for i in 0..rows {
                    let delta = dot * q[(i, k)];
                    q[(i, j)] -= delta;
                }
            }
            let norm = (0..rows).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-10 {
                ok = false;
                break;
            }
            for i in 0..rows {
                q[(i, j)] /= norm;
            }
        }
        if ok {
            return q;
        }
    }
}

pub fn haar_unitary<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    isometry(n, n, rng)
}

/// Hermitian matrix with Gaussian entries (GUE up to scaling).
pub fn hermitian<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(n, n, rng);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Hermitian matrix rescaled to unit spectral norm.
pub fn unit_norm_hermitian<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let h = hermitian(n, rng);
    let norm = crate::tensor::spectral_norm(&h).expect("square input");
    h.scale_real(1.0 / norm)
}

/// Mixed state from a Ginibre matrix: `G G† / tr(G G†)`.
pub fn density_matrix<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let g = gaussian_matrix(d, d, rng);
    let gg = &g * &g.adjoint();
    let tr = gg.trace().re;
    let m = gg.scale_real(1.0 / tr);
    // Restore exact Hermiticity lost to rounding.
    let m = (&m + &m.adjoint()).scale_real(0.5);
    DensityMatrix::new(m).expect("Ginibre states are valid")
}

/// Random CPTP map with `kraus` Kraus operators, from a Stinespring isometry.
pub fn channel<R: rand::Rng + ?Sized>(d: usize, kraus: usize, rng: &mut R) -> Result<Superoperator> {
    let v = isometry(d * kraus, d, rng);
    let ops: Vec<ComplexMatrix> = (0..kraus)
        .map(|k| {
            let mut op = ComplexMatrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    op[(i, j)] = v[(k * d + i, j)];
                }
            }
            op
        })
        .collect();
    Superoperator::from_kraus(&ops)
}

/// Entry distribution for synthetic data vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataDistribution {
    /// Uniform on `[−1, 1)`.
    UniformPm1,
    /// Uniform on `[0, 1)`.
    Uniform01,
    /// Standard normal.
    Gauss,
}

impl DataDistribution {
    pub fn as_str(self) -> &'static str {
        match self {
            DataDistribution::UniformPm1 => "uniform-pm1",
            DataDistribution::Uniform01 => "uniform-01",
            DataDistribution::Gauss => "gauss",
        }
    }
}

impl std::fmt::Display for DataDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DataDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-pm1" => Ok(DataDistribution::UniformPm1),
            "uniform-01" => Ok(DataDistribution::Uniform01),
            "gauss" => Ok(DataDistribution::Gauss),
            other => Err(domain(format!("unknown distribution {other:?} (expected uniform-pm1, uniform-01 or gauss)"))),
        }
    }
}

/// `n` independent draws from `dist`.
pub fn data_vector<R: rand::Rng + ?Sized>(n: usize, dist: DataDistribution, rng: &mut R) -> Vec<f64> {
    match dist {
        DataDistribution::UniformPm1 => {
            let u = Uniform::new(-1.0, 1.0).expect("valid range");
            (0..n).map(|_| u.sample(rng)).collect()
        }
        DataDistribution::Uniform01 => {
            let u = Uniform::new(0.0, 1.0).expect("valid range");
            (0..n).map(|_| u.sample(rng)).collect()
        }
        DataDistribution::Gauss => (0..n).map(|_| StandardNormal.sample(rng)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = unit_vector(4, &mut stream_rng(7, 0));
        let b = unit_vector(4, &mut stream_rng(7, 0));
        let c = unit_vector(4, &mut stream_rng(7, 1));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let u = haar_unitary(5, &mut stream_rng(3, 0));
        let prod = &u.adjoint() * &u;
        assert!(prod.max_abs_diff(&ComplexMatrix::identity(5)) < 1e-13);
    }

    #[test]
    fn data_vectors_follow_their_ranges() {
        let mut rng = stream_rng(1, 100);
        let x = data_vector(4000, DataDistribution::UniformPm1, &mut rng);
        assert!(x.iter().all(|v| (-1.0..1.0).contains(v)));
        let mean_abs = x.iter().map(|v| v.abs()).sum::<f64>() / 4000.0;
        assert!((mean_abs - 0.5).abs() < 0.03);
        let y = data_vector(1000, DataDistribution::Uniform01, &mut rng);
        assert!(y.iter().all(|v| (0.0..1.0).contains(v)));
        assert_eq!("gauss".parse::<DataDistribution>().unwrap(), DataDistribution::Gauss);
        assert!("cauchy".parse::<DataDistribution>().is_err());
    }
}
