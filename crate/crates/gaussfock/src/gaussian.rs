//! Gaussian states in their (w, S) parameterization: characteristic function,
//! moment recurrences, moment-generating function, the coherent channel, and
//! the positivity/uncertainty structure of the covariance matrix.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::coords::{j_matrix, real_inner, symplectic, ModeVector, RealMatrix2n};
use crate::fock::StateKind;
use crate::linalg::{CMatrix, HermitianEig};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Mean vector and covariance matrix of a Gaussian state.
///
/// The covariance acts on stacked (x, y) coordinates and is kept symmetric
/// and positive semidefinite at construction.
#[derive(Debug, Clone)]
pub struct GaussianParams {
    n: usize,
    w: ModeVector,
    s: RealMatrix2n,
}

impl GaussianParams {
    pub fn new(w: ModeVector, s: RealMatrix2n) -> Result<Self> {
        let n = w.n();
        if s.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: s.n(),
            });
        }
        let asym = s.asymmetry();
        if asym > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "covariance asymmetry {asym:.3e} exceeds 1e-12"
            )));
        }
        let eig = s.matrix().clone().symmetric_eigen();
        let min_eig = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -1e-10 {
            return Err(Error::NotPositive(min_eig));
        }
        Ok(Self { n, w, s })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mean(&self) -> &ModeVector {
        &self.w
    }

    pub fn covariance(&self) -> &RealMatrix2n {
        &self.s
    }

    /// Mean momentum coordinates <p_j> = x_j / sqrt(2), from w = sqrt(2)(l + m).
    pub fn mean_momentum(&self) -> Vec<f64> {
        let rf = self.w.real_form();
        rf.x.iter().map(|v| v / 2.0f64.sqrt()).collect()
    }

    /// Mean position coordinates <q_j> = -y_j / sqrt(2).
    pub fn mean_position(&self) -> Vec<f64> {
        let rf = self.w.real_form();
        rf.y.iter().map(|v| -v / 2.0f64.sqrt()).collect()
    }

    /// Vacuum: w = 0, S = identity.
    pub fn vacuum(n: usize) -> Self {
        Self {
            n,
            w: ModeVector::zero(n),
            s: RealMatrix2n::identity(n),
        }
    }

    /// Displaced vacuum W_u |0><0| W_u*: w = -2iu, S = identity.
    pub fn coherent(alpha: &ModeVector) -> Self {
        Self {
            n: alpha.n(),
            w: alpha.scale(-2.0 * I),
            s: RealMatrix2n::identity(alpha.n()),
        }
    }

    /// Thermal state: w = 0, S = diag(2 nbar_j + 1) on both blocks.
    pub fn thermal(nbar: &[f64]) -> Result<Self> {
        let n = nbar.len();
        if n == 0 {
            return Err(Error::InvalidParameter("mode count must be >= 1".into()));
        }
        let mut diag = Vec::with_capacity(2 * n);
        for &nb in nbar {
            if nb.is_nan() || nb < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "thermal occupation must be >= 0, got {nb}"
                )));
            }
            diag.push(2.0 * nb + 1.0);
        }
        let ys = diag.clone();
        diag.extend(ys);
        Ok(Self {
            n,
            w: ModeVector::zero(n),
            s: RealMatrix2n::from_diagonal(n, &diag)?,
        })
    }

    /// Squeezed vacuum with zeta_j = r_j exp(i phi_j) per mode: w = 0 and
    /// per-mode covariance blocks
    ///   S_xx = cosh 2r + sinh 2r cos phi,
    ///   S_yy = cosh 2r - sinh 2r cos phi,
    ///   S_xy = sinh 2r sin phi.
    pub fn squeezed(r: &[f64], phi: &[f64]) -> Result<Self> {
        let n = r.len();
        if n == 0 || phi.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n.max(1),
                got: phi.len(),
            });
        }
        let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for j in 0..n {
            if r[j].is_nan() || r[j] < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "squeezing amplitude must be >= 0, got {}",
                    r[j]
                )));
            }
            let ch = (2.0 * r[j]).cosh();
            let sh = (2.0 * r[j]).sinh();
            m[(j, j)] = ch + sh * phi[j].cos();
            m[(n + j, n + j)] = ch - sh * phi[j].cos();
            m[(j, n + j)] = sh * phi[j].sin();
            m[(n + j, j)] = sh * phi[j].sin();
        }
        Ok(Self {
            n,
            w: ModeVector::zero(n),
            s: RealMatrix2n::from_matrix(n, m)?,
        })
    }

    /// Analytic parameters of one of the standard state builders.
    pub fn for_state(kind: &StateKind, n: usize) -> Result<Self> {
        match kind {
            StateKind::Vacuum => Ok(Self::vacuum(n)),
            StateKind::Coherent { alpha } => {
                if alpha.n() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: alpha.n(),
                    });
                }
                Ok(Self::coherent(alpha))
            }
            StateKind::Thermal { nbar } => {
                if nbar.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: nbar.len(),
                    });
                }
                Self::thermal(nbar)
            }
            StateKind::Squeezed { r, phi } => {
                if r.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: r.len(),
                    });
                }
                Self::squeezed(r, phi)
            }
        }
    }

    fn check_z(&self, z: &ModeVector) -> Result<()> {
        if z.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.n(),
            });
        }
        Ok(())
    }

    /// The linear form (w, z).
    pub fn mean_form(&self, z: &ModeVector) -> Result<f64> {
        self.check_z(z)?;
        real_inner(&self.w, z)
    }

    /// The quadratic form (z, Sz).
    pub fn covariance_form(&self, z: &ModeVector) -> Result<f64> {
        self.check_z(z)?;
        self.s.quad_form(z)
    }
}

/// Double factorial with (-1)!! = 0!! = 1.
pub fn double_factorial(k: i64) -> f64 {
    let mut acc = 1.0f64;
    let mut v = k;
    while v > 1 {
        acc *= v as f64;
        v -= 2;
    }
    acc
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k.min(n));
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Characteristic function value pi^{-1/2} exp(-i(w,z) - (z,Sz)/2).
pub fn char_fn(params: &GaussianParams, z: &ModeVector) -> Result<Complex64> {
    let lin = params.mean_form(z)?;
    let quad = params.covariance_form(z)?;
    let exponent = -I * Complex64::new(lin, 0.0) - Complex64::new(0.5 * quad, 0.0);
    Ok(Complex64::new(1.0 / std::f64::consts::PI.sqrt(), 0.0) * exponent.exp())
}

/// Characteristic function of the field operator along z: t -> char_fn(tz).
pub fn characteristic_curve(params: &GaussianParams, z: &ModeVector, t: f64) -> Result<Complex64> {
    char_fn(params, &z.scale_real(t))
}

/// Central moment of the field operator: 0 for odd order,
/// (z,Sz)^{k/2} (k-1)!! for even order.
pub fn central_weyl_moment(params: &GaussianParams, z: &ModeVector, order: usize) -> Result<f64> {
    if order % 2 == 1 {
        return Ok(0.0);
    }
    let quad = params.covariance_form(z)?;
    Ok(quad.powi((order / 2) as i32) * double_factorial(order as i64 - 1))
}

/// Raw moments m_0..m_max of the field operator from the two-parameter
/// recursion: m_1 = (w,z), m_2 = (z,Sz) + m_1^2, and for n >= 3
/// m_n = [n even] (z,Sz)^{n/2} (n-1)!! + sum_{k=1..n} (-1)^{k+1} C(n,k) m_{n-k} m_1^k.
pub fn raw_weyl_moments(params: &GaussianParams, z: &ModeVector, max: usize) -> Result<Vec<f64>> {
    let m1 = params.mean_form(z)?;
    let quad = params.covariance_form(z)?;
    let mut m = Vec::with_capacity(max + 1);
    m.push(1.0);
    if max >= 1 {
        m.push(m1);
    }
    if max >= 2 {
        m.push(quad + m1 * m1);
    }
    for n in 3..=max {
        let central = if n % 2 == 0 {
            quad.powi((n / 2) as i32) * double_factorial(n as i64 - 1)
        } else {
            0.0
        };
        let mut shift = 0.0;
        let mut m1_pow = 1.0;
        for k in 1..=n {
            m1_pow *= m1;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            shift += sign * binomial(n, k) * m[n - k] * m1_pow;
        }
        m.push(central + shift);
    }
    Ok(m)
}

/// Recombines raw moments into the n-th central moment:
/// sum_k (-1)^k C(n,k) m_{n-k} (w,z)^k.
pub fn central_from_raw(raw: &[f64], m1: f64, n: usize) -> f64 {
    let mut acc = 0.0;
    let mut m1_pow = 1.0;
    for k in 0..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(n, k) * raw[n - k] * m1_pow;
        m1_pow *= m1;
    }
    acc
}

/// Moment-generating function g(x) = exp((w,z) x + (z,Sz) x^2 / 2).
pub fn mgf(params: &GaussianParams, z: &ModeVector, x: f64) -> Result<f64> {
    let lin = params.mean_form(z)?;
    let quad = params.covariance_form(z)?;
    Ok((lin * x + 0.5 * quad * x * x).exp())
}

/// The coherent channel rho -> W_u rho W_u*: shifts the mean by -2iu and
/// leaves the covariance untouched.
pub fn coherent_channel(params: &GaussianParams, u: &ModeVector) -> Result<GaussianParams> {
    params.check_z(u)?;
    let w = params.w.add(&u.scale(-2.0 * I))?;
    Ok(GaussianParams {
        n: params.n,
        w,
        s: params.s.clone(),
    })
}

/// Outcome of one variance-product inequality check.
#[derive(Debug, Clone, Copy)]
pub struct UncertaintyCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Checks (z,Sz)(u,Su) >= (z,Su)^2 + Im<z,u>^2 with 1e-10 slack.
pub fn uncertainty_check(
    params: &GaussianParams,
    z: &ModeVector,
    u: &ModeVector,
) -> Result<UncertaintyCheck> {
    let lhs = params.covariance_form(z)? * params.covariance_form(u)?;
    let cross = params.s.bilinear(z, u)?;
    let sym = symplectic(z, u)?;
    let rhs = cross * cross + sym * sym;
    Ok(UncertaintyCheck {
        lhs,
        rhs,
        holds: lhs >= rhs - 1e-10,
    })
}

/// Both readings of the covariance positivity condition S - iJ >= 0, plus
/// the norm bounds of S.
///
/// The real reading tests the real quadratic form: since (z, iJz) = |z|^2,
/// it amounts to min eig(S) >= 1. The Hermitian reading tests the complex
/// Hermitian matrix S - iJ over the complexified 2n-dimensional space. The
/// two genuinely disagree when S does not commute with J (squeezed
/// covariances), so both are always reported.
#[derive(Debug, Clone, Copy)]
pub struct BonaFideReport {
    pub min_eig_s: f64,
    pub min_eig_s_minus_ij_hermitian: f64,
    pub norm_s: f64,
    pub norm_s_inv: f64,
    pub passes_real_reading: bool,
    pub passes_hermitian_reading: bool,
}

pub fn bona_fide(params: &GaussianParams) -> Result<BonaFideReport> {
    let n = params.n;
    let s = params.s.matrix();
    let eig = s.clone().symmetric_eigen();
    let min_eig_s = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let max_abs = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    let min_abs = eig
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
    let norm_s = max_abs;
    let singular = min_abs <= 1e-14 * max_abs.max(1.0) * (2 * n) as f64;
    let norm_s_inv = if singular {
        f64::INFINITY
    } else {
        1.0 / min_abs
    };

    // Hermitian reading: S - iJ as a complex Hermitian matrix.
    let j = j_matrix(n);
    let mut herm = CMatrix::zeros(2 * n, 2 * n);
    for r in 0..2 * n {
        for c in 0..2 * n {
            herm[(r, c)] = Complex64::new(s[(r, c)], -j.matrix()[(r, c)]);
        }
    }
    let heig = HermitianEig::new(&herm)?;
    let min_eig_herm = heig.eigenvalues[0];

    Ok(BonaFideReport {
        min_eig_s,
        min_eig_s_minus_ij_hermitian: min_eig_herm,
        norm_s,
        norm_s_inv,
        passes_real_reading: !singular && min_eig_s - 1.0 >= -1e-10,
        passes_hermitian_reading: !singular && min_eig_herm >= -1e-10,
    })
}
