//! Trace machinery for observables defined through resolvent limits.
//!
//! An unbounded observable has no direct trace against a state; its moments
//! are defined through bounded Yosida approximations, and a normal operator
//! is traced through the four positive parts of its real and imaginary
//! components. At matrix scale every limit exists and must agree with the
//! plain trace, which is exactly what the tests pin down. The resolvent
//! schedule and its extrapolation are explicit so the a-posteriori error is
//! always reported next to the value.

use num_complex::Complex64;

use crate::fock::{DensityMatrix, FockOperator};
use crate::linalg::{hermiticity_defect, CMatrix, HermitianEig, NormalEig};
use crate::stencil::{central_derivative, default_step, DerivativeEstimate};
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Positive parts of a normal operator, A = (re_plus - re_minus) + i *
/// (im_plus - im_minus), all four positive semidefinite with commuting
/// spectral projections (they come from one joint eigendecomposition).
#[derive(Debug, Clone)]
pub struct NormalSplit {
    pub re_plus: FockOperator,
    pub re_minus: FockOperator,
    pub im_plus: FockOperator,
    pub im_minus: FockOperator,
}

impl NormalSplit {
    /// Reassembles the original operator.
    pub fn reconstruct(&self) -> Result<FockOperator> {
        let re = self.re_plus.sub(&self.re_minus)?;
        let im = self.im_plus.sub(&self.im_minus)?;
        re.add(&im.scale(I))
    }
}

/// Splits a normal operator into its four positive parts via one joint
/// eigendecomposition.
pub fn normal_split(a: &FockOperator) -> Result<NormalSplit> {
    let eig = NormalEig::new(a.matrix())?;
    let part = |f: &dyn Fn(Complex64) -> f64| -> Result<FockOperator> {
        let m = eig.apply_fn(|l| Complex64::new(f(l), 0.0));
        FockOperator::new(a.spec(), m, Some(true))
    };
    Ok(NormalSplit {
        re_plus: part(&|l| l.re.max(0.0))?,
        re_minus: part(&|l| (-l.re).max(0.0))?,
        im_plus: part(&|l| l.im.max(0.0))?,
        im_minus: part(&|l| (-l.im).max(0.0))?,
    })
}

/// Resolvent approximation of the generator iA for Hermitian A:
/// (iA)_eps = iA (I + i eps A)^{-1}, with eigenvalue map
/// lambda -> i lambda / (1 + i eps lambda) and norm bounded by 1/eps.
pub fn yosida(a: &FockOperator, eps: f64) -> Result<FockOperator> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "resolvent parameter must be > 0, got {eps}"
        )));
    }
    let defect = hermiticity_defect(a.matrix());
    if defect > 1e-10 {
        return Err(Error::NotHermitian(defect));
    }
    let eig = HermitianEig::new_unchecked(a.matrix());
    let m = eig.apply_fn(|l| {
        let il = I * Complex64::new(l, 0.0);
        il / (Complex64::ONE + il * eps)
    });
    FockOperator::new(a.spec(), m, Some(false))
}

/// How a resolvent schedule turns its samples into a limit value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extrapolation {
    /// Take the value at the smallest epsilon; the error estimate is the
    /// last increment.
    None,
    /// Polynomial extrapolation to eps = 0 through the last four samples.
    Richardson,
}

/// Decreasing sequence of resolvent parameters plus the extrapolation policy.
#[derive(Debug, Clone)]
pub struct YosidaSchedule {
    epsilons: Vec<f64>,
    pub extrapolation: Extrapolation,
}

impl YosidaSchedule {
    pub fn new(epsilons: Vec<f64>, extrapolation: Extrapolation) -> Result<Self> {
        if epsilons.is_empty() {
            return Err(Error::InvalidParameter("empty resolvent schedule".into()));
        }
        if epsilons.iter().any(|&e| e.is_nan() || e <= 0.0) {
            return Err(Error::InvalidParameter(
                "resolvent parameters must be > 0".into(),
            ));
        }
        if epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter(
                "resolvent schedule must be strictly decreasing".into(),
            ));
        }
        Ok(Self {
            epsilons,
            extrapolation,
        })
    }

    /// Geometric schedule 2^-3 .. 2^-16 with Richardson extrapolation.
    pub fn default_schedule() -> Self {
        Self {
            epsilons: (3..=16).map(|k| 0.5f64.powi(k)).collect(),
            extrapolation: Extrapolation::Richardson,
        }
    }

    /// Single-point schedule, no extrapolation.
    pub fn single(eps: f64) -> Result<Self> {
        Self::new(vec![eps], Extrapolation::None)
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    /// Collapses the sampled values to a limit and an error estimate.
    fn resolve(&self, values: &[f64]) -> Result<(f64, f64)> {
        let m = values.len();
        let scale = values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        match self.extrapolation {
            Extrapolation::None => {
                let value = values[m - 1];
                let estimate = if m >= 2 {
                    (values[m - 1] - values[m - 2]).abs()
                } else {
                    f64::NAN
                };
                Ok((value, if estimate.is_nan() { 0.0 } else { estimate }))
            }
            Extrapolation::Richardson => {
                let take = m.min(4);
                let xs = &self.epsilons[m - take..];
                let ys = &values[m - take..];
                // Neville tableau evaluated at eps = 0
                let mut tableau: Vec<f64> = ys.to_vec();
                let mut prev_best = tableau[take - 1];
                let mut last_increment = 0.0f64;
                for level in 1..take {
                    for i in (level..take).rev() {
                        let x_hi = xs[i];
                        let x_lo = xs[i - level];
                        tableau[i] = (x_lo * tableau[i] - x_hi * tableau[i - 1]) / (x_lo - x_hi);
                    }
                    last_increment = (tableau[take - 1] - prev_best).abs();
                    prev_best = tableau[take - 1];
                }
                let value = tableau[take - 1];
                if !value.is_finite() || last_increment > 0.1 * scale {
                    return Err(Error::NonConvergence {
                        estimate: last_increment,
                    });
                }
                Ok((value, last_increment))
            }
        }
    }
}

impl Default for YosidaSchedule {
    fn default() -> Self {
        Self::default_schedule()
    }
}

/// Diagonal weights of rho in the eigenbasis of a Hermitian operator.
fn state_weights(rho: &DensityMatrix, eig: &HermitianEig) -> Vec<f64> {
    let rotated = eig.eigenvectors.adjoint() * rho.matrix() * &eig.eigenvectors;
    (0..rotated.nrows()).map(|j| rotated[(j, j)].re).collect()
}

/// Moment of a Hermitian observable through resolvent approximations of the
/// positive parts of A^n: for each eigenvalue the map
/// lambda -> lambda / (1 + eps |lambda|) regularizes both signs at once, and
/// the schedule limit recovers tr(rho A^n). Returns (value, error_estimate).
///
/// Convergence is from below for positive A.
pub fn moment_via_yosida(
    rho: &DensityMatrix,
    a: &FockOperator,
    n: usize,
    schedule: &YosidaSchedule,
) -> Result<(f64, f64)> {
    if rho.spec() != a.spec() {
        return Err(Error::SpecMismatch(
            format!("{}", rho.spec().dim()),
            format!("{}", a.spec().dim()),
        ));
    }
    let defect = hermiticity_defect(a.matrix());
    if defect > 1e-10 {
        return Err(Error::NotHermitian(defect));
    }
    let eig = HermitianEig::new_unchecked(a.matrix());
    let weights = state_weights(rho, &eig);
    let values: Vec<f64> = schedule
        .epsilons()
        .iter()
        .map(|&eps| {
            eig.eigenvalues
                .iter()
                .zip(&weights)
                .map(|(&l, &w)| w * (l / (1.0 + eps * l.abs())).powi(n as i32))
                .sum()
        })
        .collect();
    schedule.resolve(&values)
}

/// Moment of a Hermitian observable as the n-th derivative of
/// t -> tr(rho exp(tA)) at t = 0, by central differences on the rescaled
/// generator A / c with c = max(1, spectral radius).
pub fn moment_via_derivative(
    rho: &DensityMatrix,
    a: &FockOperator,
    n: usize,
) -> Result<DerivativeEstimate> {
    if rho.spec() != a.spec() {
        return Err(Error::SpecMismatch(
            format!("{}", rho.spec().dim()),
            format!("{}", a.spec().dim()),
        ));
    }
    let defect = hermiticity_defect(a.matrix());
    if defect > 1e-10 {
        return Err(Error::NotHermitian(defect));
    }
    let eig = HermitianEig::new_unchecked(a.matrix());
    let weights = state_weights(rho, &eig);
    let c = eig.spectral_radius().max(1.0);
    let g = |s: f64| -> f64 {
        eig.eigenvalues
            .iter()
            .zip(&weights)
            .map(|(&l, &w)| w * (s * l / c).exp())
            .sum()
    };
    let est = central_derivative(g, n, default_step(n))?;
    let scale_back = c.powi(n as i32);
    let value = est.value * scale_back;
    let error_estimate = est.error_estimate * scale_back;
    let tolerance = 1e-3 * value.abs().max(1.0);
    if error_estimate > tolerance {
        return Err(Error::StencilFailure {
            estimate: error_estimate,
            tolerance,
        });
    }
    Ok(DerivativeEstimate {
        value,
        error_estimate,
    })
}

/// The norm tr(rho |A|) on the algebra generated by a normal operator.
pub fn rho_norm(rho: &DensityMatrix, a: &FockOperator) -> Result<f64> {
    if rho.spec() != a.spec() {
        return Err(Error::SpecMismatch(
            format!("{}", rho.spec().dim()),
            format!("{}", a.spec().dim()),
        ));
    }
    let eig = NormalEig::new(a.matrix())?;
    let rotated = eig.eigenvectors.adjoint() * rho.matrix() * &eig.eigenvectors;
    Ok((0..rotated.nrows())
        .map(|j| rotated[(j, j)].re * eig.eigenvalues[j].norm())
        .sum())
}

/// Trace of a normal operator through resolvent limits of the four positive
/// parts of H = (A + A*)/2 and K = (A - A*)/(2i):
/// tr(rho A) = tr(rho H+) - tr(rho H-) + i (tr(rho K+) - tr(rho K-)).
pub fn rho_trace_normal(
    rho: &DensityMatrix,
    a: &FockOperator,
    schedule: &YosidaSchedule,
) -> Result<Complex64> {
    if rho.spec() != a.spec() {
        return Err(Error::SpecMismatch(
            format!("{}", rho.spec().dim()),
            format!("{}", a.spec().dim()),
        ));
    }
    let half = Complex64::new(0.5, 0.0);
    let adj = a.matrix().adjoint();
    let h = (a.matrix() + &adj) * half;
    let k = (a.matrix() - &adj) * (-I * half);
    let mut parts = [0.0f64; 4];
    for (slot, (m, positive)) in [(&h, true), (&h, false), (&k, true), (&k, false)]
        .into_iter()
        .enumerate()
    {
        parts[slot] = positive_part_trace(rho, m, positive, schedule)?;
    }
    Ok(Complex64::new(parts[0] - parts[1], parts[2] - parts[3]))
}

/// Resolvent-limit trace of one positive part of a Hermitian matrix:
/// tr(rho P_eps) with P_eps = P (I + eps P)^{-1} along the schedule.
fn positive_part_trace(
    rho: &DensityMatrix,
    hermitian: &CMatrix,
    positive_side: bool,
    schedule: &YosidaSchedule,
) -> Result<f64> {
    let eig = HermitianEig::new_unchecked(hermitian);
    let rotated = eig.eigenvectors.adjoint() * rho.matrix() * &eig.eigenvectors;
    let weights: Vec<f64> = (0..rotated.nrows()).map(|j| rotated[(j, j)].re).collect();
    let part: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| {
            if positive_side {
                l.max(0.0)
            } else {
                (-l).max(0.0)
            }
        })
        .collect();
    let values: Vec<f64> = schedule
        .epsilons()
        .iter()
        .map(|&eps| {
            part.iter()
                .zip(&weights)
                .map(|(&p, &w)| w * p / (1.0 + eps * p))
                .sum()
        })
        .collect();
    let (value, _) = schedule.resolve(&values)?;
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coords::ModeVector;
    use crate::fock::{build_state, field_operator, quadratures, trace_pair, FockSpec, StateKind};
    use crate::linalg::{expm_taylor, spectral_norm, CVector};
    use crate::sample;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec_of_dim(dim: usize) -> FockSpec {
        FockSpec::new(1, dim).unwrap()
    }

    fn diag_operator(values: &[Complex64]) -> FockOperator {
        let spec = spec_of_dim(values.len());
        let m = CMatrix::from_diagonal(&CVector::from_column_slice(values));
        FockOperator::new(spec, m, None).unwrap()
    }

    fn diag_state(values: &[f64]) -> DensityMatrix {
        let spec = spec_of_dim(values.len());
        let m = CMatrix::from_diagonal(&CVector::from_iterator(
            values.len(),
            values.iter().map(|&v| c(v, 0.0)),
        ));
        DensityMatrix::new(spec, m).unwrap()
    }

    fn wrap(spec: FockSpec, m: CMatrix) -> FockOperator {
        FockOperator::new(spec, m, None).unwrap()
    }

    #[test]
    fn split_of_positive_hermitian_is_trivial() {
        let a = diag_operator(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let s = normal_split(&a).unwrap();
        assert!(s.re_plus.sub(&a).unwrap().max_abs() <= 1e-12);
        assert!(s.re_minus.max_abs() <= 1e-12);
        assert!(s.im_plus.max_abs() <= 1e-12);
        assert!(s.im_minus.max_abs() <= 1e-12);
    }

    #[test]
    fn split_by_sign_and_component() {
        let a = diag_operator(&[c(1.0, 0.0), c(-2.0, 0.0)]);
        let s = normal_split(&a).unwrap();
        assert_abs_diff_eq!(s.re_plus.matrix()[(0, 0)].re, 1.0);
        assert_abs_diff_eq!(s.re_minus.matrix()[(1, 1)].re, 2.0);

        let a = diag_operator(&[c(0.0, 1.0), c(1.0, -1.0)]);
        let s = normal_split(&a).unwrap();
        assert_abs_diff_eq!(s.im_plus.matrix()[(0, 0)].re, 1.0);
        assert_abs_diff_eq!(s.im_plus.matrix()[(1, 1)].re, 0.0);
        assert_abs_diff_eq!(s.im_minus.matrix()[(1, 1)].re, 1.0);
        assert_abs_diff_eq!(s.re_plus.matrix()[(1, 1)].re, 1.0);
        assert_abs_diff_eq!(s.re_plus.matrix()[(0, 0)].re, 0.0);
    }

    #[test]
    fn split_reconstructs_and_has_complementary_supports() {
        let mut rng = sample::rng(11);
        for _ in 0..20 {
            let m = sample::random_normal_matrix(&mut rng, 8, 2.0);
            let spec = spec_of_dim(8);
            let a = wrap(spec, m);
            let s = normal_split(&a).unwrap();
            let rebuilt = s.reconstruct().unwrap();
            assert!(rebuilt.sub(&a).unwrap().max_abs() <= 1e-10);
            assert!(s.re_plus.mul(&s.re_minus).unwrap().max_abs() <= 1e-9);
            assert!(s.im_plus.mul(&s.im_minus).unwrap().max_abs() <= 1e-9);
            // all four positive semidefinite
            for part in [&s.re_plus, &s.re_minus, &s.im_plus, &s.im_minus] {
                let eig = HermitianEig::new(part.matrix()).unwrap();
                assert!(eig.eigenvalues[0] >= -1e-10);
            }
        }
    }

    #[test]
    fn split_rejects_non_normal() {
        let spec = spec_of_dim(2);
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            normal_split(&wrap(spec, m)),
            Err(Error::NotNormal(_))
        ));
    }

    #[test]
    fn yosida_scalar_values() {
        let zero = diag_operator(&[c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(yosida(&zero, 1.0).unwrap().max_abs() <= 1e-15);

        let one = diag_operator(&[c(1.0, 0.0), c(1.0, 0.0)]);
        let y = yosida(&one, 1.0).unwrap();
        // i/(1+i) = (1+i)/2
        assert_abs_diff_eq!(y.matrix()[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(y.matrix()[(0, 0)].im, 0.5, epsilon = 1e-14);

        assert!(yosida(&one, 0.0).is_err());
        assert!(yosida(&one, -1.0).is_err());
    }

    #[test]
    fn yosida_norm_bound_and_contraction() {
        let mut rng = sample::rng(5);
        for _ in 0..10 {
            let spec = spec_of_dim(6);
            let a = wrap(spec, sample::random_hermitian(&mut rng, 6, 4.0));
            for eps in [0.5, 1.0] {
                let y = yosida(&a, eps).unwrap();
                assert!(spectral_norm(y.matrix()) <= 1.0 / eps + 1e-10);
                // exp(-t (iA)_eps) is a contraction; Taylor series keeps the
                // check independent of the eigendecomposition route
                for t in [0.1, 1.0] {
                    let e = expm_taylor(&(y.matrix() * c(-t, 0.0)));
                    assert!(spectral_norm(&e) <= 1.0 + 1e-10);
                }
            }
        }
    }

    #[test]
    fn moment_order_zero_is_one() {
        let rho = diag_state(&[0.5, 0.3, 0.2]);
        let a = diag_operator(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let (v, e) = moment_via_yosida(&rho, &a, 0, &YosidaSchedule::default()).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
        assert!(e <= 1e-12);
        let d = moment_via_derivative(&rho, &a, 0).unwrap();
        assert_abs_diff_eq!(d.value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn moment_first_order_diagonal() {
        let rho = diag_state(&[0.5, 0.3, 0.2]);
        let a = diag_operator(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let (v, e) = moment_via_yosida(&rho, &a, 1, &YosidaSchedule::default()).unwrap();
        assert_abs_diff_eq!(v, 1.7, epsilon = 1e-9);
        assert!((v - 1.7).abs() <= e.max(1e-9));
    }

    #[test]
    fn moment_single_point_documents_convergence_from_below() {
        let rho = diag_state(&[0.5, 0.3, 0.2]);
        let a = diag_operator(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let sched = YosidaSchedule::single(0.1).unwrap();
        let (v, _) = moment_via_yosida(&rho, &a, 1, &sched).unwrap();
        // 0.5/1.1 + 0.6/1.2 + 0.6/1.3, below the limit 1.7
        assert_abs_diff_eq!(v, 0.5 / 1.1 + 0.6 / 1.2 + 0.6 / 1.3, epsilon = 1e-14);
        assert!(v < 1.7);

        // monotone from below along the default schedule for positive A
        let mut prev = f64::NEG_INFINITY;
        for &eps in YosidaSchedule::default().epsilons() {
            let (v, _) =
                moment_via_yosida(&rho, &a, 1, &YosidaSchedule::single(eps).unwrap()).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn yosida_moments_match_direct_traces() {
        let mut rng = sample::rng(13);
        let spec = spec_of_dim(16);
        let sched = YosidaSchedule::default();
        for _ in 0..100 {
            let a = wrap(spec, sample::random_hermitian(&mut rng, 16, 5.0));
            let rho =
                DensityMatrix::new(spec, sample::random_density_matrix(&mut rng, 16)).unwrap();
            let mut power = FockOperator::identity(spec);
            for n in 0..=3usize {
                let direct = trace_pair(&rho, &power).unwrap().re;
                let (v, e) = moment_via_yosida(&rho, &a, n, &sched).unwrap();
                let tol = 1e-6f64.max(1e-6 * direct.abs());
                assert!(
                    (v - direct).abs() <= tol,
                    "n = {n}: {v} vs {direct} (est {e:.2e})"
                );
                power = power.mul(&a).unwrap();
            }
        }
    }

    #[test]
    fn derivative_moments_on_fock_states() {
        let spec = FockSpec::new(1, 24).unwrap();
        let rho = build_state(spec, &StateKind::Vacuum).unwrap();
        let (q, _) = quadratures(spec, 1).unwrap();
        let est = moment_via_derivative(&rho, &q, 2).unwrap();
        assert!((est.value - 0.5).abs() <= 1e-6f64.max(est.error_estimate));

        let f = field_operator(spec, &ModeVector::basis(1, 1).unwrap()).unwrap();
        let est = moment_via_derivative(&rho, &f, 2).unwrap();
        assert!((est.value - 1.0).abs() <= 1e-5);
    }

    #[test]
    fn derivative_and_yosida_routes_agree() {
        let mut rng = sample::rng(23);
        let spec = spec_of_dim(12);
        let sched = YosidaSchedule::default();
        for _ in 0..25 {
            let a = wrap(spec, sample::random_hermitian(&mut rng, 12, 3.0));
            let rho =
                DensityMatrix::new(spec, sample::random_density_matrix(&mut rng, 12)).unwrap();
            for n in 0..=4usize {
                let (vy, ey) = moment_via_yosida(&rho, &a, n, &sched).unwrap();
                let vd = moment_via_derivative(&rho, &a, n).unwrap();
                let budget = (ey + vd.error_estimate).max(1e-7 * vy.abs().max(1.0));
                assert!(
                    (vy - vd.value).abs() <= budget,
                    "n = {n}: {vy} vs {} budget {budget:.2e}",
                    vd.value
                );
            }
        }
    }

    #[test]
    fn rho_norm_values() {
        let rho = diag_state(&[0.5, 0.5]);
        let zero = diag_operator(&[c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(rho_norm(&rho, &zero).unwrap(), 0.0);

        let a = diag_operator(&[c(1.0, 0.0), c(-2.0, 0.0)]);
        assert_abs_diff_eq!(rho_norm(&rho, &a).unwrap(), 1.5, epsilon = 1e-12);

        // Hoelder step: |A|_rho <= |A^2|_rho^(1/2)
        let a2 = a.mul(&a).unwrap();
        let n2 = rho_norm(&rho, &a2).unwrap();
        assert_abs_diff_eq!(n2, 2.5, epsilon = 1e-12);
        assert!(1.5 <= n2.sqrt() + 1e-12);

        // zero iff supports are orthogonal
        let rho_ground = diag_state(&[1.0, 0.0]);
        let excited_only = diag_operator(&[c(0.0, 0.0), c(3.0, 0.0)]);
        assert_abs_diff_eq!(rho_norm(&rho_ground, &excited_only).unwrap(), 0.0);
    }

    #[test]
    fn hoelder_chain_on_random_normals() {
        let mut rng = sample::rng(29);
        let spec = spec_of_dim(12);
        for _ in 0..40 {
            let a = wrap(spec, sample::random_normal_matrix(&mut rng, 12, 2.0));
            let rho =
                DensityMatrix::new(spec, sample::random_density_matrix(&mut rng, 12)).unwrap();
            let mut norms = vec![1.0f64]; // |A^0|_rho = tr rho = 1
            let mut power = FockOperator::identity(spec);
            for _ in 1..=4 {
                power = power.mul(&a).unwrap();
                norms.push(rho_norm(&rho, &power).unwrap());
            }
            for n in 1..=4usize {
                for k in 1..=n {
                    assert!(
                        norms[k] <= norms[n].powf(k as f64 / n as f64) + 1e-10,
                        "k = {k}, n = {n}: {} vs {}",
                        norms[k],
                        norms[n]
                    );
                }
            }
        }
    }

    #[test]
    fn triangle_inequality_on_polynomials() {
        let mut rng = sample::rng(31);
        let spec = spec_of_dim(10);
        for _ in 0..25 {
            let a = wrap(spec, sample::random_normal_matrix(&mut rng, 10, 1.5));
            let rho =
                DensityMatrix::new(spec, sample::random_density_matrix(&mut rng, 10)).unwrap();
            let poly = |coeffs: &[Complex64]| -> FockOperator {
                let mut acc = FockOperator::identity(spec).scale(coeffs[0]);
                let mut power = FockOperator::identity(spec);
                for &co in &coeffs[1..] {
                    power = power.mul(&a).unwrap();
                    acc = acc.add(&power.scale(co)).unwrap();
                }
                acc
            };
            let rand_c = |rng: &mut rand_chacha::ChaCha8Rng| {
                c(
                    rand::Rng::random_range(rng, -1.0..1.0),
                    rand::Rng::random_range(rng, -1.0..1.0),
                )
            };
            let fc: Vec<Complex64> = (0..4).map(|_| rand_c(&mut rng)).collect();
            let gc: Vec<Complex64> = (0..4).map(|_| rand_c(&mut rng)).collect();
            let alpha = rand_c(&mut rng);
            let beta = rand_c(&mut rng);
            let f = poly(&fc);
            let g = poly(&gc);
            let combo = f.scale(alpha).add(&g.scale(beta)).unwrap();
            let lhs = rho_norm(&rho, &combo).unwrap();
            let rhs = alpha.norm() * rho_norm(&rho, &f).unwrap()
                + beta.norm() * rho_norm(&rho, &g).unwrap();
            assert!(lhs <= rhs + 1e-10, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn rho_trace_normal_values() {
        let sched = YosidaSchedule::default();
        // Hermitian input: imaginary part vanishes
        let rho = diag_state(&[0.6, 0.4]);
        let a = diag_operator(&[c(2.0, 0.0), c(-1.0, 0.0)]);
        let tr = rho_trace_normal(&rho, &a, &sched).unwrap();
        assert_abs_diff_eq!(tr.re, 0.6 * 2.0 - 0.4, epsilon = 1e-9);
        assert!(tr.im.abs() <= 1e-10);

        // A = iI
        let a = diag_operator(&[c(0.0, 1.0), c(0.0, 1.0)]);
        let tr = rho_trace_normal(&rho, &a, &sched).unwrap();
        assert_abs_diff_eq!(tr.im, 1.0, epsilon = 1e-9);
        assert!(tr.re.abs() <= 1e-10);

        // componentwise example
        let rho = diag_state(&[0.7, 0.3]);
        let a = diag_operator(&[c(0.0, 2.0), c(-1.0, 0.0)]);
        let tr = rho_trace_normal(&rho, &a, &sched).unwrap();
        assert_abs_diff_eq!(tr.re, -0.3, epsilon = 1e-9);
        assert_abs_diff_eq!(tr.im, 1.4, epsilon = 1e-9);
    }

    #[test]
    fn rho_trace_normal_matches_direct_and_spectral_decomposition() {
        let mut rng = sample::rng(37);
        let spec = spec_of_dim(10);
        let sched = YosidaSchedule::default();
        for _ in 0..20 {
            let a = wrap(spec, sample::random_normal_matrix(&mut rng, 10, 2.0));
            let rho =
                DensityMatrix::new(spec, sample::random_density_matrix(&mut rng, 10)).unwrap();
            let via_parts = rho_trace_normal(&rho, &a, &sched).unwrap();
            let direct = trace_pair(&rho, &a).unwrap();
            assert!((via_parts - direct).norm() <= 1e-8);

            // the positive-part traces also match sum_k rho_k |P^(1/2) u_k|^2
            let split = normal_split(&a).unwrap();
            let (vals, vecs) = rho.spectral(1e-12);
            let eig = HermitianEig::new(split.re_plus.matrix()).unwrap();
            let sqrt_p = eig.apply_fn(|l| c(l.max(0.0).sqrt(), 0.0));
            let lemma_route: f64 = vals
                .iter()
                .zip(&vecs)
                .map(|(&w, v)| w * (&sqrt_p * v).norm_squared())
                .sum();
            let direct_p = trace_pair(&rho, &split.re_plus).unwrap().re;
            assert!((lemma_route - direct_p).abs() <= 1e-9);
        }
    }

    #[test]
    fn rho_trace_normal_is_linear_on_commuting_operators() {
        let mut rng = sample::rng(41);
        let spec = spec_of_dim(10);
        let sched = YosidaSchedule::default();
        for _ in 0..20 {
            // commuting normal pair from one eigenbasis
            let v = sample::random_unitary(&mut rng, 10);
            let mut diag_a = CVector::zeros(10);
            let mut diag_b = CVector::zeros(10);
            for j in 0..10 {
                diag_a[j] = c(
                    rand::Rng::random_range(&mut rng, -2.0..2.0),
                    rand::Rng::random_range(&mut rng, -2.0..2.0),
                );
                diag_b[j] = c(
                    rand::Rng::random_range(&mut rng, -2.0..2.0),
                    rand::Rng::random_range(&mut rng, -2.0..2.0),
                );
            }
            let a = wrap(spec, &v * CMatrix::from_diagonal(&diag_a) * v.adjoint());
            let b = wrap(spec, &v * CMatrix::from_diagonal(&diag_b) * v.adjoint());
            let alpha = c(
                rand::Rng::random_range(&mut rng, -2.0..2.0),
                rand::Rng::random_range(&mut rng, -2.0..2.0),
            );
            let rho =
                DensityMatrix::new(spec, sample::random_density_matrix(&mut rng, 10)).unwrap();
            let combo = a.scale(alpha).add(&b).unwrap();
            let lhs = rho_trace_normal(&rho, &combo, &sched).unwrap();
            let rhs = alpha * rho_trace_normal(&rho, &a, &sched).unwrap()
                + rho_trace_normal(&rho, &b, &sched).unwrap();
            assert!((lhs - rhs).norm() <= 1e-9, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn schedule_validation() {
        assert!(YosidaSchedule::new(vec![], Extrapolation::None).is_err());
        assert!(YosidaSchedule::new(vec![0.1, 0.2], Extrapolation::None).is_err());
        assert!(YosidaSchedule::new(vec![0.1, -0.2], Extrapolation::None).is_err());
        assert!(YosidaSchedule::new(vec![0.2, 0.1], Extrapolation::Richardson).is_ok());
        let def = YosidaSchedule::default();
        assert_eq!(def.epsilons().len(), 14);
        assert_abs_diff_eq!(def.epsilons()[0], 0.125);
    }

    #[test]
    fn pathological_schedule_reports_non_convergence() {
        // far from the eps -> 0 regime the extrapolation cannot settle: for
        // |lambda| >> 1/eps the samples follow 1/eps instead of lambda
        let rho = diag_state(&[0.5, 0.5]);
        let a = diag_operator(&[c(1e3, 0.0), c(1e3, 0.0)]);
        let sched =
            YosidaSchedule::new(vec![2.0, 1.0, 0.5, 0.25], Extrapolation::Richardson).unwrap();
        assert!(matches!(
            moment_via_yosida(&rho, &a, 1, &sched),
            Err(Error::NonConvergence { .. })
        ));
    }
}
