//! Dense complex linear algebra helpers shared by the operator modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Max-norm of a complex matrix.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.norm()))
}

/// Max-norm of the anti-Hermitian part, `max |M - M*|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let d = m - m.adjoint();
    max_abs(&d)
}

/// Max-norm of the commutator `[M, M*]`; zero iff M is normal.
pub fn normality_defect(m: &CMatrix) -> f64 {
    let adj = m.adjoint();
    let d = m * &adj - &adj * m;
    max_abs(&d)
}

/// Eigendecomposition of a Hermitian matrix: `m = V diag(w) V*` with real,
/// ascending eigenvalues and unitary V.
pub struct HermitianEig {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: CMatrix,
}

impl HermitianEig {
    pub fn new(m: &CMatrix) -> Result<Self> {
        let defect = hermiticity_defect(m);
        let scale = max_abs(m).max(1.0);
        if defect > 1e-10 * scale.max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self::new_unchecked(m))
    }

    /// Hermitizes the input and decomposes without a defect check.
    pub fn new_unchecked(m: &CMatrix) -> Self {
        let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let se = herm.symmetric_eigen();
        let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
        let n = order.len();
        let eigenvalues = DVector::from_fn(n, |i, _| se.eigenvalues[order[i]]);
        let mut eigenvectors = CMatrix::zeros(n, n);
        for (col, &src) in order.iter().enumerate() {
            eigenvectors.set_column(col, &se.eigenvectors.column(src));
        }
        Self {
            eigenvalues,
            eigenvectors,
        }
    }

    /// Rebuilds `V f(diag) V*` for a complex-valued function of the eigenvalues.
    pub fn apply_fn<F: Fn(f64) -> Complex64>(&self, f: F) -> CMatrix {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            let fj = f(self.eigenvalues[j]);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        &scaled * self.eigenvectors.adjoint()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    }
}

/// Eigendecomposition of a normal matrix: `m = V diag(w) V*` with complex
/// eigenvalues and unitary V.
///
/// Built from Hermitian decompositions of the commuting pair
/// `H = (M + M*)/2`, `K = (M - M*)/(2i)`: diagonalize H, then diagonalize K
/// restricted to each (clustered) eigenspace of H. The two parts share one
/// eigenbasis, so spectral projections of any function of the eigenvalues
/// commute by construction.
pub struct NormalEig {
    pub eigenvalues: CVector,
    pub eigenvectors: CMatrix,
}

impl NormalEig {
    pub fn new(m: &CMatrix) -> Result<Self> {
        let defect = normality_defect(m);
        // |[A, A*]| <= 2|A|^2 always, so the defect is gated relative to
        // that scale; an absolute gate would reject float-built powers of
        // large Hermitian operators.
        let scale = max_abs(m).max(1.0);
        if defect > 1e-9 * scale * scale {
            return Err(Error::NotNormal(defect));
        }
        Ok(Self::new_unchecked(m))
    }

    pub fn new_unchecked(m: &CMatrix) -> Self {
        let half = Complex64::new(0.5, 0.0);
        let half_over_i = Complex64::new(0.0, -0.5);
        let adj = m.adjoint();
        let h = (m + &adj) * half;
        let k = (m - &adj) * half_over_i;

        let h_eig = HermitianEig::new_unchecked(&h);
        let n = h_eig.eigenvalues.len();
        let mut basis = h_eig.eigenvectors.clone();
        let mut eigenvalues = CVector::zeros(n);

        // cluster H-eigenvalues, then diagonalize K inside each cluster
        let cluster_tol = 1e-8 * h_eig.spectral_radius().max(1.0);
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n
                && (h_eig.eigenvalues[end] - h_eig.eigenvalues[end - 1]).abs() <= cluster_tol
            {
                end += 1;
            }
            let width = end - start;
            let block = basis.columns(start, width).into_owned();
            if width == 1 {
                let kv = (block.adjoint() * &k * &block)[(0, 0)].re;
                eigenvalues[start] = Complex64::new(h_eig.eigenvalues[start], kv);
            } else {
                let k_block = block.adjoint() * &k * &block;
                let k_eig = HermitianEig::new_unchecked(&k_block);
                let rotated = &block * &k_eig.eigenvectors;
                for (offset, col) in (start..end).enumerate() {
                    basis.set_column(col, &rotated.column(offset));
                    eigenvalues[col] =
                        Complex64::new(h_eig.eigenvalues[col], k_eig.eigenvalues[offset]);
                }
            }
            start = end;
        }

        Self {
            eigenvalues,
            eigenvectors: basis,
        }
    }

    /// Rebuilds `V f(diag) V*` for a function of the complex eigenvalues.
    pub fn apply_fn<F: Fn(Complex64) -> Complex64>(&self, f: F) -> CMatrix {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            let fj = f(self.eigenvalues[j]);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        &scaled * self.eigenvectors.adjoint()
    }
}

/// Largest singular value (operator 2-norm) of a complex matrix.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    let gram = m.adjoint() * m;
    let eig = HermitianEig::new_unchecked(&gram);
    eig.eigenvalues
        .iter()
        .fold(0.0f64, |acc, v| acc.max(*v))
        .max(0.0)
        .sqrt()
}

/// Matrix exponential by plain Taylor summation; adequate for small norms.
pub fn expm_taylor(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut acc = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..200 {
        term = (&term * m) / Complex64::new(k as f64, 0.0);
        acc += &term;
        if max_abs(&term) < 1e-18 {
            break;
        }
    }
    acc
}
