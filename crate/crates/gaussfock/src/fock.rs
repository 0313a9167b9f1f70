//! Truncated n-mode Fock space: ladder, quadrature, field and Weyl operators
//! as dense matrices, exponential vectors, and density-matrix state builders.
//!
//! Basis ordering is row-major over occupation tuples (k_1, ..., k_n) with
//! k_1 slowest, each mode truncated to levels 0..d-1, total dimension d^n.
//! Identities that are exact only in the untruncated space are asserted on an
//! "interior block": basis states whose occupations stay below d/2 (for
//! displacement-type checks) or below d-1 (for commutator checks).

use num_complex::Complex64;

use crate::coords::{symplectic, ModeVector};
use crate::linalg::{max_abs, CMatrix, CVector, HermitianEig};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Mode count and per-mode cutoff of a truncated Fock space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockSpec {
    n: usize,
    d: usize,
}

impl FockSpec {
    /// At most `MAX_DIM` basis states are allowed per space.
    pub const MAX_DIM: usize = 1_000_000;

    pub fn new(n: usize, d: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter("mode count must be >= 1".into()));
        }
        if d < 2 {
            return Err(Error::InvalidParameter(
                "per-mode cutoff must be >= 2".into(),
            ));
        }
        let mut dim: usize = 1;
        for _ in 0..n {
            dim = dim
                .checked_mul(d)
                .filter(|&v| v <= Self::MAX_DIM)
                .ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "total dimension {}^{} exceeds the {} limit",
                        d,
                        n,
                        Self::MAX_DIM
                    ))
                })?;
        }
        Ok(Self { n, d })
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn cutoff(&self) -> usize {
        self.d
    }

    /// Total dimension d^n.
    pub fn dim(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    /// Stride of mode j (1-based) in the flat index: d^(n-j).
    fn stride(&self, j: usize) -> usize {
        self.d.pow((self.n - j) as u32)
    }

    /// Occupation tuple of a flat index.
    pub fn occupations(&self, mut index: usize) -> Vec<usize> {
        let mut occ = vec![0usize; self.n];
        for j in (0..self.n).rev() {
            occ[j] = index % self.d;
            index /= self.d;
        }
        occ
    }

    /// Flat index of an occupation tuple.
    pub fn index_of(&self, occ: &[usize]) -> usize {
        occ.iter().fold(0, |acc, &k| acc * self.d + k)
    }

    /// Indices whose occupations are all strictly below `limit`.
    pub fn indices_with_occ_below(&self, limit: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.occupations(i).iter().all(|&k| k < limit))
            .collect()
    }

    /// Interior block for displacement-type checks: occupations below d/2.
    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.occupations(i).iter().all(|&k| 2 * k < self.d))
            .collect()
    }

    /// Block excluding the top level of every mode (occupations <= d-2),
    /// where truncated commutators are exact.
    pub fn below_top_indices(&self) -> Vec<usize> {
        self.indices_with_occ_below(self.d - 1)
    }

    fn check_match(&self, other: &FockSpec) -> Result<()> {
        if self != other {
            return Err(Error::SpecMismatch(
                format!("{}x{}", self.n, self.d),
                format!("{}x{}", other.n, other.d),
            ));
        }
        Ok(())
    }

    fn check_mode(&self, j: usize) -> Result<()> {
        if j == 0 || j > self.n {
            return Err(Error::ModeOutOfRange {
                mode: j,
                modes: self.n,
            });
        }
        Ok(())
    }

    fn check_mode_count(&self, z: &ModeVector) -> Result<()> {
        if z.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: z.n(),
            });
        }
        Ok(())
    }
}

/// Dense operator on a truncated Fock space.
#[derive(Debug, Clone)]
pub struct FockOperator {
    spec: FockSpec,
    matrix: CMatrix,
    hermitian_hint: Option<bool>,
}

impl FockOperator {
    pub fn new(spec: FockSpec, matrix: CMatrix, hermitian_hint: Option<bool>) -> Result<Self> {
        if matrix.nrows() != spec.dim() || matrix.ncols() != spec.dim() {
            return Err(Error::InvalidParameter(format!(
                "matrix is {}x{}, spec dimension is {}",
                matrix.nrows(),
                matrix.ncols(),
                spec.dim()
            )));
        }
        if hermitian_hint == Some(true) {
            let defect = crate::linalg::hermiticity_defect(&matrix);
            if defect > 1e-10 {
                return Err(Error::NotHermitian(defect));
            }
        }
        Ok(Self {
            spec,
            matrix,
            hermitian_hint,
        })
    }

    pub fn identity(spec: FockSpec) -> Self {
        Self {
            spec,
            matrix: CMatrix::identity(spec.dim(), spec.dim()),
            hermitian_hint: Some(true),
        }
    }

    pub fn spec(&self) -> FockSpec {
        self.spec
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn hermitian_hint(&self) -> Option<bool> {
        self.hermitian_hint
    }

    pub fn dagger(&self) -> Self {
        Self {
            spec: self.spec,
            matrix: self.matrix.adjoint(),
            hermitian_hint: self.hermitian_hint,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.spec.check_match(&other.spec)?;
        Ok(Self {
            spec: self.spec,
            matrix: &self.matrix * &other.matrix,
            hermitian_hint: None,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.spec.check_match(&other.spec)?;
        let hint = match (self.hermitian_hint, other.hermitian_hint) {
            (Some(true), Some(true)) => Some(true),
            _ => None,
        };
        Ok(Self {
            spec: self.spec,
            matrix: &self.matrix + &other.matrix,
            hermitian_hint: hint,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.spec.check_match(&other.spec)?;
        let hint = match (self.hermitian_hint, other.hermitian_hint) {
            (Some(true), Some(true)) => Some(true),
            _ => None,
        };
        Ok(Self {
            spec: self.spec,
            matrix: &self.matrix - &other.matrix,
            hermitian_hint: hint,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            spec: self.spec,
            matrix: &self.matrix * factor,
            hermitian_hint: None,
        }
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let ab = self.mul(other)?;
        let ba = other.mul(self)?;
        ab.sub(&ba)
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        self.spec.check_match(&v.spec)?;
        Ok(FockVector {
            spec: self.spec,
            coefficients: &self.matrix * &v.coefficients,
        })
    }

    /// Max-norm over the full matrix.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.matrix)
    }

    /// Max-norm restricted to the given row/column index set.
    pub fn max_abs_on(&self, indices: &[usize]) -> f64 {
        let mut m = 0.0f64;
        for &r in indices {
            for &c in indices {
                m = m.max(self.matrix[(r, c)].norm());
            }
        }
        m
    }
}

/// Dense vector on a truncated Fock space.
#[derive(Debug, Clone)]
pub struct FockVector {
    spec: FockSpec,
    coefficients: CVector,
}

impl FockVector {
    pub fn new(spec: FockSpec, coefficients: CVector) -> Result<Self> {
        if coefficients.len() != spec.dim() {
            return Err(Error::InvalidParameter(format!(
                "vector length {} does not match dimension {}",
                coefficients.len(),
                spec.dim()
            )));
        }
        if coefficients
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::InvalidParameter(
                "vector coefficients must be finite".into(),
            ));
        }
        Ok(Self { spec, coefficients })
    }

    pub fn spec(&self) -> FockSpec {
        self.spec
    }

    pub fn coefficients(&self) -> &CVector {
        &self.coefficients
    }

    /// Inner product, antilinear in self.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.spec.check_match(&other.spec)?;
        Ok(self.coefficients.dotc(&other.coefficients))
    }

    pub fn norm(&self) -> f64 {
        self.coefficients.norm()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            spec: self.spec,
            coefficients: &self.coefficients * factor,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.spec.check_match(&other.spec)?;
        Ok(Self {
            spec: self.spec,
            coefficients: &self.coefficients - &other.coefficients,
        })
    }

    /// Euclidean norm restricted to the given indices.
    pub fn norm_on(&self, indices: &[usize]) -> f64 {
        indices
            .iter()
            .map(|&i| self.coefficients[i].norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Rank-one projector |v><v|.
    pub fn outer(&self) -> CMatrix {
        let dim = self.spec.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for r in 0..dim {
            for c in 0..dim {
                m[(r, c)] = self.coefficients[r] * self.coefficients[c].conj();
            }
        }
        m
    }
}

/// Embeds a single-mode matrix into mode j (1-based) of the full space.
fn embed_single_mode(spec: FockSpec, j: usize, single: &CMatrix) -> CMatrix {
    let d = spec.cutoff();
    let dim = spec.dim();
    let stride = spec.stride(j);
    let outer = dim / (d * stride);
    let mut full = CMatrix::zeros(dim, dim);
    for left in 0..outer {
        let base = left * d * stride;
        for kr in 0..d {
            for kc in 0..d {
                let v = single[(kr, kc)];
                if v != Complex64::ZERO {
                    for right in 0..stride {
                        full[(base + kr * stride + right, base + kc * stride + right)] = v;
                    }
                }
            }
        }
    }
    full
}

fn single_mode_annihilation(d: usize) -> CMatrix {
    let mut a = CMatrix::zeros(d, d);
    for k in 1..d {
        a[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    a
}

/// Annihilation and creation operators of mode j: a|k> = sqrt(k)|k-1> on the
/// single mode, tensored with identities elsewhere.
pub fn ladder(spec: FockSpec, j: usize) -> Result<(FockOperator, FockOperator)> {
    spec.check_mode(j)?;
    let a_single = single_mode_annihilation(spec.cutoff());
    let a = embed_single_mode(spec, j, &a_single);
    let a_dag = a.adjoint();
    Ok((
        FockOperator {
            spec,
            matrix: a,
            hermitian_hint: Some(false),
        },
        FockOperator {
            spec,
            matrix: a_dag,
            hermitian_hint: Some(false),
        },
    ))
}

/// Position and momentum of mode j: q = (a + a*)/sqrt(2), p = -i(a - a*)/sqrt(2).
pub fn quadratures(spec: FockSpec, j: usize) -> Result<(FockOperator, FockOperator)> {
    let (a, a_dag) = ladder(spec, j)?;
    let inv_sqrt2 = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
    let q = (a.matrix() + a_dag.matrix()) * inv_sqrt2;
    let p = (a.matrix() - a_dag.matrix()) * (-I * inv_sqrt2);
    Ok((
        FockOperator {
            spec,
            matrix: q,
            hermitian_hint: Some(true),
        },
        FockOperator {
            spec,
            matrix: p,
            hermitian_hint: Some(true),
        },
    ))
}

/// Field operator i sum_j (z_j a_j* - conj(z_j) a_j), the self-adjoint
/// generator of t -> W_tz. Equals sqrt(2) sum_j (x_j p_j - y_j q_j).
///
/// Each matrix entry touches exactly one mode, so the construction is
/// entrywise linear in z.
pub fn field_operator(spec: FockSpec, z: &ModeVector) -> Result<FockOperator> {
    spec.check_mode_count(z)?;
    let d = spec.cutoff();
    let dim = spec.dim();
    let mut m = CMatrix::zeros(dim, dim);
    for j in 1..=spec.n {
        let zj = z.amplitude(j - 1);
        if zj == Complex64::ZERO {
            continue;
        }
        let up = I * zj; // creation coefficient i z_j
        let down = (I * zj).conj(); // annihilation coefficient -i conj(z_j)
        let stride = spec.stride(j);
        let outer = dim / (d * stride);
        for left in 0..outer {
            let base = left * d * stride;
            for k in 0..d - 1 {
                let s = ((k + 1) as f64).sqrt();
                for right in 0..stride {
                    let lo = base + k * stride + right;
                    let hi = base + (k + 1) * stride + right;
                    m[(hi, lo)] = up * s; // a_j* : |k> -> sqrt(k+1)|k+1>
                    m[(lo, hi)] = down * s; // a_j  : |k+1> -> sqrt(k+1)|k>
                }
            }
        }
    }
    Ok(FockOperator {
        spec,
        matrix: m,
        hermitian_hint: Some(true),
    })
}

/// Unnormalized exponential vector with coefficients prod_j z_j^{k_j}/sqrt(k_j!).
/// Satisfies <eps_z, eps_u> = exp(<z, u>) up to truncation.
pub fn exponential_vector(spec: FockSpec, z: &ModeVector) -> Result<FockVector> {
    spec.check_mode_count(z)?;
    let d = spec.cutoff();
    for j in 0..spec.n {
        let ratio = z.amplitude(j).norm_sqr() / d as f64;
        if ratio > 0.5 {
            return Err(Error::CutoffTooSmall { mode: j + 1, ratio });
        }
    }
    // per-mode coefficient tables t[k] = z^k / sqrt(k!)
    let tables: Vec<Vec<Complex64>> = (0..spec.n)
        .map(|j| {
            let zj = z.amplitude(j);
            let mut t = Vec::with_capacity(d);
            t.push(Complex64::ONE);
            for k in 1..d {
                let prev = t[k - 1];
                t.push(prev * zj / Complex64::new((k as f64).sqrt(), 0.0));
            }
            t
        })
        .collect();
    let coefficients = CVector::from_fn(spec.dim(), |i, _| {
        spec.occupations(i)
            .iter()
            .enumerate()
            .map(|(j, &k)| tables[j][k])
            .product()
    });
    Ok(FockVector { spec, coefficients })
}

/// Normalized coherent vector exp(-|z|^2/2) eps_z.
pub fn coherent_vector(spec: FockSpec, z: &ModeVector) -> Result<FockVector> {
    let raw = exponential_vector(spec, z)?;
    Ok(raw.scale(Complex64::new((-0.5 * z.norm_sq()).exp(), 0.0)))
}

/// The vacuum basis vector (also the exponential vector at z = 0).
pub fn vacuum_vector(spec: FockSpec) -> FockVector {
    let mut coefficients = CVector::zeros(spec.dim());
    coefficients[0] = Complex64::ONE;
    FockVector { spec, coefficients }
}

/// Weyl (displacement) operator W_z = exp(sum_j z_j a_j* - conj(z_j) a_j),
/// realized as V exp(-i Lambda) V* from the eigendecomposition of the field
/// operator so that it is unitary up to eigensolver error.
pub fn weyl_operator(spec: FockSpec, z: &ModeVector) -> Result<FockOperator> {
    spec.check_mode_count(z)?;
    let bound = spec.cutoff() as f64 / 4.0;
    let norm_sq = z.norm_sq();
    if norm_sq > bound {
        return Err(Error::TruncationSanity {
            what: "|z|^2 for the Weyl operator",
            value: norm_sq,
            bound,
        });
    }
    let field = field_operator(spec, z)?;
    let eig = HermitianEig::new_unchecked(field.matrix());
    let w = eig.apply_fn(|l| (-I * Complex64::new(l, 0.0)).exp());
    Ok(FockOperator {
        spec,
        matrix: w,
        hermitian_hint: Some(false),
    })
}

/// Max-norm of W_z W_u - exp(-i Im<z,u>) W_{z+u} on the interior block.
pub fn weyl_relation_residual(spec: FockSpec, z: &ModeVector, u: &ModeVector) -> Result<f64> {
    let wz = weyl_operator(spec, z)?;
    let wu = weyl_operator(spec, u)?;
    let wzu = weyl_operator(spec, &z.add(u)?)?;
    let phase = (-I * Complex64::new(symplectic(z, u)?, 0.0)).exp();
    let diff = wz.mul(&wu)?.sub(&wzu.scale(phase))?;
    Ok(diff.max_abs_on(&spec.interior_indices()))
}

/// State builders for the library's fixtures.
#[derive(Debug, Clone, PartialEq)]
pub enum StateKind {
    Vacuum,
    /// Displaced vacuum W_u |0><0| W_u* with one amplitude per mode.
    Coherent {
        alpha: ModeVector,
    },
    /// Tensor product of geometric photon-number mixtures, mean nbar per mode.
    Thermal {
        nbar: Vec<f64>,
    },
    /// Squeezed vacuum U|0><0|U*, U = exp((conj(zeta) a^2 - zeta a*^2)/2)
    /// per mode with zeta = r exp(i phi).
    Squeezed {
        r: Vec<f64>,
        phi: Vec<f64>,
    },
}

impl StateKind {
    pub fn name(&self) -> &'static str {
        match self {
            StateKind::Vacuum => "vacuum",
            StateKind::Coherent { .. } => "coherent",
            StateKind::Thermal { .. } => "thermal",
            StateKind::Squeezed { .. } => "squeezed",
        }
    }
}

/// Density matrix on a truncated Fock space, renormalized to unit trace.
///
/// `leakage` records the truncation defect observed at construction: the
/// trace weight lost to renormalization plus the residual weight sitting on
/// the top level of any mode.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    spec: FockSpec,
    matrix: CMatrix,
    leakage: f64,
}

impl DensityMatrix {
    pub fn new(spec: FockSpec, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != spec.dim() || matrix.ncols() != spec.dim() {
            return Err(Error::InvalidParameter(format!(
                "matrix is {}x{}, spec dimension is {}",
                matrix.nrows(),
                matrix.ncols(),
                spec.dim()
            )));
        }
        let defect = crate::linalg::hermiticity_defect(&matrix);
        if defect > 1e-10 {
            return Err(Error::NotHermitian(defect));
        }
        let raw_trace: Complex64 = matrix.diagonal().iter().sum();
        if raw_trace.re.is_nan() || raw_trace.re <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "state trace {} is not positive",
                raw_trace.re
            )));
        }
        let normalized = &matrix / Complex64::new(raw_trace.re, 0.0);
        let eig = HermitianEig::new_unchecked(&normalized);
        let min_eig = eig.eigenvalues[0];
        if min_eig < -1e-10 {
            return Err(Error::NotPositive(min_eig));
        }
        let top_weight: f64 = (0..spec.dim())
            .filter(|&i| spec.occupations(i).iter().any(|&k| k == spec.cutoff() - 1))
            .map(|i| normalized[(i, i)].re)
            .sum();
        let leakage = (1.0 - raw_trace.re).abs() + top_weight.max(0.0);
        Ok(Self {
            spec,
            matrix: normalized,
            leakage,
        })
    }

    pub fn from_pure(v: &FockVector) -> Result<Self> {
        Self::new(v.spec, v.outer())
    }

    pub fn spec(&self) -> FockSpec {
        self.spec
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    /// Spectral decomposition with eigenvalues below `threshold` dropped.
    pub fn spectral(&self, threshold: f64) -> (Vec<f64>, Vec<CVector>) {
        let eig = HermitianEig::new_unchecked(&self.matrix);
        let mut vals = Vec::new();
        let mut vecs = Vec::new();
        for j in 0..eig.eigenvalues.len() {
            if eig.eigenvalues[j] > threshold {
                vals.push(eig.eigenvalues[j]);
                vecs.push(eig.eigenvectors.column(j).into_owned());
            }
        }
        (vals, vecs)
    }
}

/// Builds one of the standard states.
pub fn build_state(spec: FockSpec, kind: &StateKind) -> Result<DensityMatrix> {
    match kind {
        StateKind::Vacuum => DensityMatrix::from_pure(&vacuum_vector(spec)),
        StateKind::Coherent { alpha } => {
            let w = weyl_operator(spec, alpha)?;
            let psi = w.apply(&vacuum_vector(spec))?;
            DensityMatrix::from_pure(&psi)
        }
        StateKind::Thermal { nbar } => {
            if nbar.len() != spec.modes() {
                return Err(Error::DimensionMismatch {
                    expected: spec.modes(),
                    got: nbar.len(),
                });
            }
            if let Some(bad) = nbar.iter().find(|&&v| !v.is_finite() || v < 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "thermal occupation must be finite and >= 0, got {bad}"
                )));
            }
            let d = spec.cutoff();
            let tables: Vec<Vec<f64>> = nbar
                .iter()
                .map(|&nb| {
                    let nu = nb / (nb + 1.0);
                    (0..d).map(|k| (1.0 - nu) * nu.powi(k as i32)).collect()
                })
                .collect();
            let dim = spec.dim();
            let mut m = CMatrix::zeros(dim, dim);
            for i in 0..dim {
                let w: f64 = spec
                    .occupations(i)
                    .iter()
                    .enumerate()
                    .map(|(j, &k)| tables[j][k])
                    .product();
                m[(i, i)] = Complex64::new(w, 0.0);
            }
            DensityMatrix::new(spec, m)
        }
        StateKind::Squeezed { r, phi } => {
            if r.len() != spec.modes() || phi.len() != spec.modes() {
                return Err(Error::DimensionMismatch {
                    expected: spec.modes(),
                    got: r.len().min(phi.len()),
                });
            }
            if let Some(bad) = r.iter().find(|&&v| !v.is_finite() || v < 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "squeezing amplitude must be finite and >= 0, got {bad}"
                )));
            }
            let d = spec.cutoff();
            for &rj in r.iter() {
                let mean_photons = rj.sinh().powi(2);
                if 16.0 * mean_photons > d as f64 {
                    return Err(Error::TruncationSanity {
                        what: "16 sinh(r)^2 for the squeezed builder",
                        value: 16.0 * mean_photons,
                        bound: d as f64,
                    });
                }
            }
            // per-mode unitary U = exp(G), G = (conj(zeta) a^2 - zeta a*^2)/2;
            // iG is Hermitian, so U = V exp(-i Lambda) V*.
            let mut full: Option<CMatrix> = None;
            for j in 0..spec.modes() {
                let zeta = Complex64::from_polar(r[j], phi[j]);
                let a = single_mode_annihilation(d);
                let a2 = &a * &a;
                let g = &a2 * zeta.conj() * Complex64::new(0.5, 0.0)
                    - a2.adjoint() * zeta * Complex64::new(0.5, 0.0);
                let h = &g * I;
                let eig = HermitianEig::new_unchecked(&h);
                let u = eig.apply_fn(|l| (-I * Complex64::new(l, 0.0)).exp());
                full = Some(match full {
                    None => u,
                    Some(acc) => acc.kronecker(&u),
                });
            }
            let u = full.expect("at least one mode");
            let psi_coeffs = u.column(0).into_owned();
            let psi = FockVector::new(spec, psi_coeffs)?;
            DensityMatrix::from_pure(&psi)
        }
    }
}

/// Finite-dimensional trace pairing tr(rho A).
pub fn trace_pair(rho: &DensityMatrix, a: &FockOperator) -> Result<Complex64> {
    rho.spec.check_match(&a.spec)?;
    let dim = rho.spec.dim();
    let mut tr = Complex64::ZERO;
    for i in 0..dim {
        for j in 0..dim {
            tr += rho.matrix[(i, j)] * a.matrix[(j, i)];
        }
    }
    Ok(tr)
}

/// Expectation <v| A |v> for a pure state.
pub fn expectation(v: &FockVector, a: &FockOperator) -> Result<Complex64> {
    let av = a.apply(v)?;
    v.inner(&av)
}
