//! State files, format v1: `state.bin` holds the density matrix as
//! little-endian f64 pairs (re, im) in row-major order; `state.json` is the
//! sidecar with the space geometry, basis ordering, leakage, builder
//! parameters, and (when known) the analytic (w, S).

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coords::{ModeVector, RealMatrix2n};
use crate::fock::{DensityMatrix, FockSpec};
use crate::gaussian::GaussianParams;
use crate::linalg::CMatrix;
use crate::{Error, Result};

pub const STATE_FORMAT_VERSION: u32 = 1;
pub const BASIS_ORDERING: &str = "row-major occupation tuples, first mode slowest";

pub const STATE_BIN: &str = "state.bin";
pub const STATE_JSON: &str = "state.json";

/// JSON form of (w, S): mean as [re, im] pairs, covariance as rows of the
/// 2n x 2n matrix on (x, y) coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianParamsJson {
    pub modes: usize,
    pub mean: Vec<[f64; 2]>,
    pub covariance: Vec<Vec<f64>>,
}

impl GaussianParamsJson {
    pub fn from_params(params: &GaussianParams) -> Self {
        let n = params.n();
        let mean = params
            .mean()
            .amplitudes()
            .iter()
            .map(|a| [a.re, a.im])
            .collect();
        let s = params.covariance().matrix();
        let covariance = (0..2 * n)
            .map(|r| (0..2 * n).map(|c| s[(r, c)]).collect())
            .collect();
        Self {
            modes: n,
            mean,
            covariance,
        }
    }

    pub fn to_params(&self) -> Result<GaussianParams> {
        if self.mean.len() != self.modes || self.covariance.len() != 2 * self.modes {
            return Err(Error::BadStateFile(
                "analytic parameter dimensions are inconsistent".into(),
            ));
        }
        let w = ModeVector::new(
            self.mean
                .iter()
                .map(|[re, im]| Complex64::new(*re, *im))
                .collect(),
        )?;
        let mut m = DMatrix::<f64>::zeros(2 * self.modes, 2 * self.modes);
        for (r, row) in self.covariance.iter().enumerate() {
            if row.len() != 2 * self.modes {
                return Err(Error::BadStateFile("ragged covariance rows".into()));
            }
            for (c, &v) in row.iter().enumerate() {
                m[(r, c)] = v;
            }
        }
        GaussianParams::new(w, RealMatrix2n::from_matrix(self.modes, m)?)
    }
}

/// Sidecar metadata for a stored state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateMetadata {
    pub format_version: u32,
    pub kind: String,
    pub modes: usize,
    pub cutoff: usize,
    pub dim: usize,
    pub basis_ordering: String,
    pub leakage: f64,
    pub parameters: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub analytic: Option<GaussianParamsJson>,
}

/// Writes `state.bin` and `state.json` into `dir` (created if missing).
pub fn save_state(
    dir: &Path,
    rho: &DensityMatrix,
    kind: &str,
    parameters: serde_json::Value,
    analytic: Option<&GaussianParams>,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    let spec = rho.spec();
    let dim = spec.dim();
    let mut bytes = Vec::with_capacity(dim * dim * 16);
    for r in 0..dim {
        for c in 0..dim {
            let v = rho.matrix()[(r, c)];
            bytes.extend_from_slice(&v.re.to_le_bytes());
            bytes.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    fs::write(dir.join(STATE_BIN), bytes)?;

    let meta = StateMetadata {
        format_version: STATE_FORMAT_VERSION,
        kind: kind.to_string(),
        modes: spec.modes(),
        cutoff: spec.cutoff(),
        dim,
        basis_ordering: BASIS_ORDERING.to_string(),
        leakage: rho.leakage(),
        parameters,
        analytic: analytic.map(GaussianParamsJson::from_params),
    };
    fs::write(dir.join(STATE_JSON), serde_json::to_string_pretty(&meta)?)?;
    Ok(())
}

/// Reads a stored state back; the density-matrix invariants are re-checked
/// on construction.
pub fn load_state(dir: &Path) -> Result<(DensityMatrix, StateMetadata)> {
    let meta: StateMetadata = serde_json::from_str(&fs::read_to_string(dir.join(STATE_JSON))?)?;
    if meta.format_version != STATE_FORMAT_VERSION {
        return Err(Error::BadStateFile(format!(
            "unsupported format version {}",
            meta.format_version
        )));
    }
    let spec = FockSpec::new(meta.modes, meta.cutoff)?;
    let dim = spec.dim();
    if meta.dim != dim {
        return Err(Error::BadStateFile(format!(
            "metadata dimension {} does not match {}^{}",
            meta.dim, meta.cutoff, meta.modes
        )));
    }
    let bytes = fs::read(dir.join(STATE_BIN))?;
    if bytes.len() != dim * dim * 16 {
        return Err(Error::BadStateFile(format!(
            "state.bin holds {} bytes, expected {}",
            bytes.len(),
            dim * dim * 16
        )));
    }
    let mut m = CMatrix::zeros(dim, dim);
    let mut offset = 0;
    for r in 0..dim {
        for c in 0..dim {
            let re = f64::from_le_bytes(bytes[offset..offset + 8].try_into().unwrap());
            let im = f64::from_le_bytes(bytes[offset + 8..offset + 16].try_into().unwrap());
            m[(r, c)] = Complex64::new(re, im);
            offset += 16;
        }
    }
    let rho = DensityMatrix::new(spec, m)?;
    Ok((rho, meta))
}
