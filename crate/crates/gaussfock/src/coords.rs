//! Bridge between the complex mode space and its real 2n-dimensional view.
//!
//! A vector of n complex amplitudes `z` can equally be read as the real pair
//! `(x, y)` with `z = x + iy`. The real inner product `(z, u) = Re<z, u>` and
//! the symplectic form `Im<z, u>` both live on that real view, as does the
//! operator `J` (multiplication by `-i`). Covariance matrices are stored as
//! real `(2n) x (2n)` matrices acting on stacked `[x; y]` coordinates.
//!
//! Complex inner products here are antilinear in the *first* argument:
//! `<a z, u> = conj(a) <z, u>`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// A complex amplitude vector over n modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeVector {
    amplitudes: Vec<Complex64>,
}

impl ModeVector {
    /// Wraps a nonempty, finite amplitude vector.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidParameter("mode count must be >= 1".into()));
        }
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::InvalidParameter(
                "mode amplitudes must be finite".into(),
            ));
        }
        Ok(Self { amplitudes })
    }

    /// The zero vector on n modes.
    pub fn zero(n: usize) -> Self {
        Self {
            amplitudes: vec![Complex64::ZERO; n.max(1)],
        }
    }

    /// The canonical basis vector delta_j (1-based mode index).
    pub fn basis(n: usize, j: usize) -> Result<Self> {
        if j == 0 || j > n {
            return Err(Error::ModeOutOfRange { mode: j, modes: n });
        }
        let mut amplitudes = vec![Complex64::ZERO; n];
        amplitudes[j - 1] = Complex64::ONE;
        Ok(Self { amplitudes })
    }

    /// Single-mode vector from one complex amplitude.
    pub fn single(z: Complex64) -> Self {
        Self {
            amplitudes: vec![z],
        }
    }

    pub fn n(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, j: usize) -> Complex64 {
        self.amplitudes[j]
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Componentwise sum; both vectors must have the same mode count.
    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_n(self, other)?;
        Ok(Self {
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn scale_real(&self, t: f64) -> Self {
        self.scale(Complex64::new(t, 0.0))
    }

    pub fn neg(&self) -> Self {
        self.scale_real(-1.0)
    }

    /// Complex inner product, antilinear in self.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        check_same_n(self, other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Splits into the real pair (x, y) with z = x + iy.
    pub fn real_form(&self) -> RealForm {
        RealForm {
            x: self.amplitudes.iter().map(|a| a.re).collect(),
            y: self.amplitudes.iter().map(|a| a.im).collect(),
        }
    }

    /// Stacked real coordinates [x; y] of length 2n.
    pub fn stacked(&self) -> DVector<f64> {
        let n = self.n();
        DVector::from_fn(2 * n, |i, _| {
            if i < n {
                self.amplitudes[i].re
            } else {
                self.amplitudes[i - n].im
            }
        })
    }
}

fn check_same_n(a: &ModeVector, b: &ModeVector) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: b.n(),
        });
    }
    Ok(())
}

/// The real-Hilbert-space view of a [`ModeVector`]: z = x + iy.
///
/// Storage is the (x, y) pair. The canonical real basis used for covariance
/// entries elsewhere is `{delta_j, e_j = -i delta_j}`; in that basis the
/// coordinates of z are `(x_j, -y_j)`, exposed by [`RealForm::delta_e_coords`].
#[derive(Debug, Clone, PartialEq)]
pub struct RealForm {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl RealForm {
    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Reassembles the complex vector z = x + iy exactly.
    pub fn to_mode_vector(&self) -> ModeVector {
        ModeVector {
            amplitudes: self
                .x
                .iter()
                .zip(&self.y)
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect(),
        }
    }

    /// Coordinates in the {delta_j, e_j = -i delta_j} basis: (x_j, -y_j).
    pub fn delta_e_coords(&self) -> (Vec<f64>, Vec<f64>) {
        (self.x.clone(), self.y.iter().map(|v| -v).collect())
    }
}

/// Real (2n) x (2n) matrix acting on stacked (x, y) coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix2n {
    n: usize,
    entries: DMatrix<f64>,
}

impl RealMatrix2n {
    pub fn from_matrix(n: usize, entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != 2 * n || entries.ncols() != 2 * n {
            return Err(Error::InvalidParameter(format!(
                "expected a {0}x{0} matrix, got {1}x{2}",
                2 * n,
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            entries: DMatrix::identity(2 * n, 2 * n),
        }
    }

    /// Diagonal matrix from 2n entries (x block first, then y block).
    pub fn from_diagonal(n: usize, diag: &[f64]) -> Result<Self> {
        if diag.len() != 2 * n {
            return Err(Error::InvalidParameter(format!(
                "expected {} diagonal entries, got {}",
                2 * n,
                diag.len()
            )));
        }
        Ok(Self {
            n,
            entries: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Max-norm of the antisymmetric part.
    pub fn asymmetry(&self) -> f64 {
        let t = &self.entries - self.entries.transpose();
        t.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.asymmetry() <= tol
    }

    /// Replaces the matrix by its symmetric part, returning the asymmetry
    /// that was removed.
    pub fn symmetrize(&mut self) -> f64 {
        let asym = self.asymmetry();
        let sym = (&self.entries + self.entries.transpose()) * 0.5;
        self.entries = sym;
        asym
    }

    /// Quadratic form (z, Mz) on the real view.
    pub fn quad_form(&self, z: &ModeVector) -> Result<f64> {
        self.bilinear(z, z)
    }

    /// Bilinear form (z, Mu) = z_R^T M u_R on stacked coordinates.
    pub fn bilinear(&self, z: &ModeVector, u: &ModeVector) -> Result<f64> {
        if z.n() != self.n || u.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: if z.n() != self.n { z.n() } else { u.n() },
            });
        }
        let zr = z.stacked();
        let ur = u.stacked();
        Ok((zr.transpose() * &self.entries * ur)[(0, 0)])
    }

    /// Applies the matrix to the real view of z, returning a complex vector.
    pub fn apply(&self, z: &ModeVector) -> Result<ModeVector> {
        if z.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.n(),
            });
        }
        let out = &self.entries * z.stacked();
        Ok(ModeVector {
            amplitudes: (0..self.n)
                .map(|j| Complex64::new(out[j], out[self.n + j]))
                .collect(),
        })
    }
}

/// Real inner product (z, u) = Re<z, u> = x.x' + y.y'.
pub fn real_inner(z: &ModeVector, u: &ModeVector) -> Result<f64> {
    check_same_n(z, u)?;
    Ok(z.amplitudes
        .iter()
        .zip(&u.amplitudes)
        .map(|(a, b)| a.re * b.re + a.im * b.im)
        .sum())
}

/// Symplectic form Im<z, u> = x.y' - y.x'. Antisymmetric.
pub fn symplectic(z: &ModeVector, u: &ModeVector) -> Result<f64> {
    check_same_n(z, u)?;
    Ok(z.amplitudes
        .iter()
        .zip(&u.amplitudes)
        .map(|(a, b)| a.re * b.im - a.im * b.re)
        .sum())
}

/// Multiplication by -i: (x, y) -> (y, -x). Squares to -identity.
pub fn apply_j(z: &ModeVector) -> ModeVector {
    ModeVector {
        amplitudes: z
            .amplitudes
            .iter()
            .map(|a| Complex64::new(a.im, -a.re))
            .collect(),
    }
}

/// Real 2n x 2n matrix of J (multiplication by -i) on (x, y) blocks:
/// [[0, I], [-I, 0]]. Satisfies J^2 = -I and z^T J u = Im<z, u>.
pub fn j_matrix(n: usize) -> RealMatrix2n {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        m[(j, n + j)] = 1.0;
        m[(n + j, j)] = -1.0;
    }
    RealMatrix2n { n, entries: m }
}
