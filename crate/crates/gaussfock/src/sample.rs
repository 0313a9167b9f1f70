//! Seeded random fixtures for sweeps and tests. One ChaCha8 generator per
//! sweep keeps every run reproducible from a single u64 seed.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coords::ModeVector;
use crate::linalg::{CMatrix, HermitianEig};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniformly oriented mode vector with norm drawn in (0, max_norm].
pub fn random_mode_vector(rng: &mut ChaCha8Rng, n: usize, max_norm: f64) -> ModeVector {
    let raw: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let target = max_norm * rng.random_range(0.05..1.0f64);
    let factor = if norm > 0.0 { target / norm } else { 0.0 };
    ModeVector::new(raw.into_iter().map(|c| c * factor).collect())
        .expect("finite amplitudes by construction")
}

/// Random Hermitian matrix rescaled to the requested spectral radius.
pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            m[(r, c)] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    let herm = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = HermitianEig::new_unchecked(&herm);
    let rho = eig.spectral_radius().max(1e-12);
    herm * Complex64::new(radius / rho, 0.0)
}

/// Haar-ish random unitary: the eigenbasis of a random Hermitian matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    HermitianEig::new_unchecked(&random_hermitian(rng, dim, 1.0)).eigenvectors
}

/// Random normal matrix V diag(lambda) V* with |lambda| <= radius.
pub fn random_normal_matrix(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> CMatrix {
    let v = random_unitary(rng, dim);
    let lambda = DVector::from_fn(dim, |_, _| {
        Complex64::new(
            rng.random_range(-radius..radius),
            rng.random_range(-radius..radius),
        ) / 2.0f64.sqrt()
    });
    &v * CMatrix::from_diagonal(&lambda) * v.adjoint()
}

/// Random full-rank density matrix G G* / tr(G G*).
pub fn random_density_matrix(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    let mut g = CMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            g[(r, c)] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    let psd = &g * g.adjoint();
    let tr: Complex64 = psd.diagonal().iter().sum();
    psd / tr
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermiticity_defect, max_abs, normality_defect};

    #[test]
    fn deterministic_from_seed() {
        let mut a = rng(42);
        let mut b = rng(42);
        let za = random_mode_vector(&mut a, 3, 0.75);
        let zb = random_mode_vector(&mut b, 3, 0.75);
        assert_eq!(za, zb);
        assert!(za.norm() <= 0.75 + 1e-12);
    }

    #[test]
    fn random_matrices_have_declared_structure() {
        let mut r = rng(7);
        let h = random_hermitian(&mut r, 8, 3.0);
        assert!(hermiticity_defect(&h) <= 1e-12);
        assert!(HermitianEig::new_unchecked(&h).spectral_radius() <= 3.0 + 1e-9);

        let u = random_unitary(&mut r, 8);
        let id = CMatrix::identity(8, 8);
        assert!(max_abs(&(u.adjoint() * &u - id)) <= 1e-10);

        let nm = random_normal_matrix(&mut r, 8, 2.0);
        assert!(normality_defect(&nm) <= 1e-10);

        let rho = random_density_matrix(&mut r, 8);
        let tr: Complex64 = rho.diagonal().iter().sum();
        assert!((tr.re - 1.0).abs() <= 1e-12);
        let eig = HermitianEig::new_unchecked(&rho);
        assert!(eig.eigenvalues[0] >= -1e-12);
    }
}
