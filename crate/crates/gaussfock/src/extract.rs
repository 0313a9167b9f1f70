//! Round-trip verification: pull (w, S) back out of a truncated density
//! matrix through trace formulas and compare against the analytic
//! parameters, including a sampled characteristic-function residual.
//!
//! The mean comes from w = sqrt(2) sum_j (<p_j> delta_j + <q_j> e_j); the
//! covariance entries from second moments of the quadratures, assembled in
//! the {delta_j, e_j} basis and converted to (x, y) storage (which flips the
//! sign of the off-diagonal blocks).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::coords::{symplectic, ModeVector, RealMatrix2n};
use crate::fock::{
    build_state, field_operator, quadratures, trace_pair, weyl_operator, DensityMatrix, FockSpec,
    StateKind,
};
use crate::gaussian::{char_fn, GaussianParams};
use crate::integrability::{rho_trace_normal, YosidaSchedule};
use crate::linalg::{normality_defect, CMatrix};
use crate::sample;
use crate::{Error, Result};

/// Residuals of one extraction run against analytic parameters.
#[derive(Debug, Clone)]
pub struct ExtractionResult {
    pub w_hat: ModeVector,
    pub s_hat: RealMatrix2n,
    /// Max-abs difference between extracted and analytic mean components.
    pub residual_w: f64,
    /// Max-abs difference between extracted and analytic covariance entries,
    /// including the asymmetry removed by symmetrization.
    pub residual_s: f64,
    /// Max over the sample grid of |pi^{-1/2} tr(rho W_z) - char_fn(z)|.
    pub char_fn_residual: f64,
}

/// Extracted covariance with its bookkeeping.
#[derive(Debug, Clone)]
pub struct CovarianceExtraction {
    /// Symmetrized covariance in (x, y) storage.
    pub matrix: RealMatrix2n,
    /// Max-norm of the asymmetric part that was removed.
    pub asymmetry: f64,
    /// Raw complex traces tr(rho p_j p_k), tr(rho q_j q_k), tr(rho p_j q_k);
    /// their imaginary parts carry the commutator content.
    pub raw_pp: CMatrix,
    pub raw_qq: CMatrix,
    pub raw_pq: CMatrix,
}

/// Mean vector with components sqrt(2)(tr(rho p_j) - i tr(rho q_j)).
pub fn extract_mean(rho: &DensityMatrix) -> Result<ModeVector> {
    let spec = rho.spec();
    let sqrt2 = 2.0f64.sqrt();
    let mut amps = Vec::with_capacity(spec.modes());
    for j in 1..=spec.modes() {
        let (q, p) = quadratures(spec, j)?;
        let mp = trace_pair(rho, &p)?.re;
        let mq = trace_pair(rho, &q)?.re;
        amps.push(Complex64::new(sqrt2 * mp, -sqrt2 * mq));
    }
    ModeVector::new(amps)
}

/// tr(x y) without forming the product matrix.
fn trace_product(x: &CMatrix, y: &CMatrix) -> Complex64 {
    let n = x.nrows();
    let mut acc = Complex64::ZERO;
    for a in 0..n {
        for b in 0..n {
            acc += x[(a, b)] * y[(b, a)];
        }
    }
    acc
}

/// Covariance entries from second moments:
///   (delta_j, S delta_k) = 2(Re tr(rho p_j p_k) - <p_j><p_k>)
///   (e_j, S e_k)         = 2(Re tr(rho q_j q_k) - <q_j><q_k>)
///   (delta_j, S e_k)     = 2(Re tr(rho p_j q_k) - <p_j><q_k>)
pub fn extract_covariance(rho: &DensityMatrix) -> Result<CovarianceExtraction> {
    let spec = rho.spec();
    if spec.cutoff() < 8 {
        return Err(Error::TruncationSanity {
            what: "cutoff for second-moment extraction",
            value: spec.cutoff() as f64,
            bound: 8.0,
        });
    }
    let n = spec.modes();
    let mut qs = Vec::with_capacity(n);
    let mut ps = Vec::with_capacity(n);
    for j in 1..=n {
        let (q, p) = quadratures(spec, j)?;
        qs.push(q);
        ps.push(p);
    }
    let mean_p: Vec<f64> = ps
        .iter()
        .map(|p| trace_pair(rho, p).map(|v| v.re))
        .collect::<Result<_>>()?;
    let mean_q: Vec<f64> = qs
        .iter()
        .map(|q| trace_pair(rho, q).map(|v| v.re))
        .collect::<Result<_>>()?;

    // rho * p_j once per mode, then every pair trace is an entrywise sum
    let rho_p: Vec<CMatrix> = ps.iter().map(|p| rho.matrix() * p.matrix()).collect();
    let rho_q: Vec<CMatrix> = qs.iter().map(|q| rho.matrix() * q.matrix()).collect();

    let mut raw_pp = CMatrix::zeros(n, n);
    let mut raw_qq = CMatrix::zeros(n, n);
    let mut raw_pq = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            raw_pp[(j, k)] = trace_product(&rho_p[j], ps[k].matrix());
            raw_qq[(j, k)] = trace_product(&rho_q[j], qs[k].matrix());
            raw_pq[(j, k)] = trace_product(&rho_p[j], qs[k].matrix());
        }
    }

    // assemble in the {delta, e} basis, then flip the off-diagonal blocks
    // for (x, y) storage
    let mut s = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..n {
            let dd = 2.0 * (raw_pp[(j, k)].re - mean_p[j] * mean_p[k]);
            let ee = 2.0 * (raw_qq[(j, k)].re - mean_q[j] * mean_q[k]);
            let de = 2.0 * (raw_pq[(j, k)].re - mean_p[j] * mean_q[k]);
            s[(j, k)] = dd;
            s[(n + j, n + k)] = ee;
            s[(j, n + k)] = -de;
            s[(n + k, j)] = -de;
        }
    }
    let mut matrix = RealMatrix2n::from_matrix(n, s)?;
    let asymmetry = matrix.symmetrize();
    Ok(CovarianceExtraction {
        matrix,
        asymmetry,
        raw_pp,
        raw_qq,
        raw_pq,
    })
}

/// Deterministic sample grid in the ball |z| <= radius: a lattice with
/// `points_per_dim` points per real dimension, subsampled to `cap` points
/// with the seeded generator when the lattice is larger.
pub fn sample_grid(
    n: usize,
    radius: f64,
    points_per_dim: usize,
    cap: usize,
    seed: u64,
) -> Vec<ModeVector> {
    let ppd = points_per_dim.max(2);
    let dims = 2 * n;
    let total = ppd.pow(dims as u32);
    let coord = |step: usize| -> f64 { -radius + 2.0 * radius * step as f64 / (ppd - 1) as f64 };
    let mut points = Vec::new();
    for flat in 0..total {
        let mut rem = flat;
        let mut re = vec![0.0f64; n];
        let mut im = vec![0.0f64; n];
        for d in 0..dims {
            let step = rem % ppd;
            rem /= ppd;
            if d < n {
                re[d] = coord(step);
            } else {
                im[d - n] = coord(step);
            }
        }
        let norm_sq: f64 = re.iter().zip(&im).map(|(a, b)| a * a + b * b).sum();
        if norm_sq <= radius * radius + 1e-12 {
            let amps: Vec<Complex64> = re
                .into_iter()
                .zip(im)
                .map(|(a, b)| Complex64::new(a, b))
                .collect();
            points.push(ModeVector::new(amps).expect("finite lattice point"));
        }
    }
    if points.len() > cap {
        let mut rng = sample::rng(seed);
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.shuffle(&mut rng);
        order.truncate(cap);
        order.sort_unstable();
        points = order.into_iter().map(|i| points[i].clone()).collect();
    }
    points
}

/// Builds the state, extracts (w, S), and reports residuals against the
/// analytic parameters plus the characteristic-function grid residual.
/// Truncation error shows up in the residuals instead of failing the run.
pub fn verify_roundtrip(
    params: &GaussianParams,
    kind: &StateKind,
    spec: FockSpec,
    grid_points_per_dim: usize,
    grid_cap: usize,
    seed: u64,
) -> Result<ExtractionResult> {
    let rho = build_state(spec, kind)?;
    roundtrip_with_state(params, &rho, grid_points_per_dim, grid_cap, seed)
}

/// Same as [`verify_roundtrip`] for an already-built state.
pub fn roundtrip_with_state(
    params: &GaussianParams,
    rho: &DensityMatrix,
    grid_points_per_dim: usize,
    grid_cap: usize,
    seed: u64,
) -> Result<ExtractionResult> {
    let spec = rho.spec();
    let w_hat = extract_mean(rho)?;
    let cov = extract_covariance(rho)?;

    let residual_w = w_hat
        .amplitudes()
        .iter()
        .zip(params.mean().amplitudes())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    let diff = cov.matrix.matrix() - params.covariance().matrix();
    let residual_s = diff.iter().fold(0.0f64, |m, v| m.max(v.abs())) + cov.asymmetry;

    let grid = sample_grid(spec.modes(), 0.75, grid_points_per_dim, grid_cap, seed);
    let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
    let residuals: Vec<f64> = grid
        .par_iter()
        .map(|z| -> Result<f64> {
            let w = weyl_operator(spec, z)?;
            let numeric = trace_pair(rho, &w)? * inv_sqrt_pi;
            let analytic = char_fn(params, z)?;
            Ok((numeric - analytic).norm())
        })
        .collect::<Result<Vec<_>>>()?;
    let char_fn_residual = residuals.into_iter().fold(0.0f64, f64::max);

    Ok(ExtractionResult {
        w_hat,
        s_hat: cov.matrix,
        residual_w,
        residual_s,
        char_fn_residual,
    })
}

/// Two-point function diagnostics for the integrability hypothesis behind
/// the covariance formulas.
#[derive(Debug, Clone)]
pub struct AmenabilityProbe {
    /// Direct trace tr(rho p(z) p(u)).
    pub trace_zu: Complex64,
    /// The same trace through resolvent limits of the four positive parts.
    pub trace_via_parts: Complex64,
    /// |trace_zu - trace_via_parts|.
    pub route_gap: f64,
    /// |Im tr(rho p(z)p(u)) - Im<z,u>|.
    pub sym_check: f64,
    /// Normality defect of the truncated product; exact zero only without a
    /// cutoff, so it is reported rather than enforced.
    pub normality_defect: f64,
}

pub fn amenability_probe(
    rho: &DensityMatrix,
    z: &ModeVector,
    u: &ModeVector,
) -> Result<AmenabilityProbe> {
    let spec = rho.spec();
    if spec.cutoff() < 8 {
        return Err(Error::TruncationSanity {
            what: "cutoff for the two-point probe",
            value: spec.cutoff() as f64,
            bound: 8.0,
        });
    }
    let pz = field_operator(spec, z)?;
    let pu = field_operator(spec, u)?;
    let product = pz.mul(&pu)?;
    let trace_zu = trace_pair(rho, &product)?;
    let trace_via_parts = rho_trace_normal(rho, &product, &YosidaSchedule::default())?;
    let sym = symplectic(z, u)?;
    Ok(AmenabilityProbe {
        trace_zu,
        trace_via_parts,
        route_gap: (trace_zu - trace_via_parts).norm(),
        sym_check: (trace_zu.im - sym).abs(),
        normality_defect: normality_defect(product.matrix()),
    })
}
