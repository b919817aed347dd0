//! SVD-based emulator for time-series outputs.
//!
//! The `L × N` response matrix is decomposed as `Y = U·D·Vᵀ`. The first `p`
//! scaled left vectors `bᵢ = dᵢuᵢ` form a basis and each coefficient
//! `cᵢ(x)`, observed as `V_{j,i}` at input `x_j`, gets its own zero-mean GP:
//! `y(x) ≈ Σᵢ cᵢ(x)·bᵢ + ε`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::design::Design;
use crate::error::{Error, Result};
use crate::gpmodel::{fit_simple, FitOptions, GpModel, ModelParts};
use crate::kernels::CorrelationSpec;
use crate::linalg::{svd_general, SpectralDecomp};
use crate::rng::derive_seed;

/// Singular values at or below this fraction of `d₁` do not count toward the
/// numerical rank.
const RANK_TOL: f64 = 1e-12;

/// `L × N` matrix whose column `j` is the series observed at input `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMatrix(DMatrix<f64>);

impl ResponseMatrix {
    pub fn new(y: DMatrix<f64>) -> Result<Self> {
        if y.nrows() < 2 || y.ncols() < 2 {
            return Err(Error::InvalidSize(format!(
                "response matrix needs L >= 2 and N >= 2, got {}x{}",
                y.nrows(),
                y.ncols()
            )));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("response matrix contains non-finite values".into()));
        }
        Ok(ResponseMatrix(y))
    }

    /// From one series per run.
    pub fn from_columns(series: &[Vec<f64>]) -> Result<Self> {
        let l = series.first().map_or(0, Vec::len);
        if let Some(bad) = series.iter().find(|s| s.len() != l) {
            return Err(Error::DimensionMismatch {
                expected: l,
                found: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(l, series.len(), |t, j| series[j][t]))
    }

    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn runs(&self) -> usize {
        self.0.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.0.column(j).iter().copied().collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }
}

/// Thin SVD with `k = min(L, N)` components.
pub fn decompose(y: &ResponseMatrix) -> Result<SpectralDecomp> {
    svd_general(y.as_matrix())
}

/// Smallest `p` whose leading singular values carry at least `frac` of
/// `Σ dᵢ²`; `frac = 1` gives the numerical rank.
pub fn select_p(d: &[f64], frac: f64) -> Result<usize> {
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(Error::Domain(format!("frac must lie in (0, 1], got {frac}")));
    }
    let d1 = d.first().copied().unwrap_or(0.0);
    if !(d1 > 0.0) {
        return Err(Error::AllZeroSpectrum);
    }
    if frac == 1.0 {
        return Ok(d.iter().filter(|&&v| v > RANK_TOL * d1).count());
    }
    let total: f64 = d.iter().map(|v| v * v).sum();
    let mut acc = 0.0;
    for (i, v) in d.iter().enumerate() {
        acc += v * v;
        if acc >= frac * total {
            return Ok(i + 1);
        }
    }
    Ok(d.len())
}

#[derive(Debug, Clone)]
pub struct SvdGpModel {
    /// `L × p`, column `i` is `dᵢuᵢ`.
    basis: DMatrix<f64>,
    coefficients: Vec<GpModel>,
    singular_values: Vec<f64>,
    residual_var: f64,
    /// Per-time mean removed before the decomposition (zeros when not centered).
    center: Vec<f64>,
    x: Design,
}

/// Serialized form of [`SvdGpModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdGpParts {
    pub basis: Vec<Vec<f64>>,
    pub singular_values: Vec<f64>,
    pub residual_var: f64,
    pub center: Vec<f64>,
    pub x: Design,
    pub coefficients: Vec<ModelParts>,
}

impl SvdGpModel {
    pub fn p(&self) -> usize {
        self.basis.ncols()
    }

    pub fn series_len(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn coefficient_models(&self) -> &[GpModel] {
        &self.coefficients
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn residual_var(&self) -> f64 {
        self.residual_var
    }

    pub fn x(&self) -> &Design {
        &self.x
    }

    pub fn to_parts(&self) -> SvdGpParts {
        SvdGpParts {
            basis: self
                .basis
                .column_iter()
                .map(|c| c.iter().copied().collect())
                .collect(),
            singular_values: self.singular_values.clone(),
            residual_var: self.residual_var,
            center: self.center.clone(),
            x: self.x.clone(),
            coefficients: self.coefficients.iter().map(|m| m.parts().clone()).collect(),
        }
    }

    pub fn from_parts(parts: SvdGpParts) -> Result<Self> {
        let l = parts.center.len();
        let p = parts.basis.len();
        if p == 0 || p != parts.coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: p,
                found: parts.coefficients.len(),
            });
        }
        if let Some(bad) = parts.basis.iter().find(|c| c.len() != l) {
            return Err(Error::DimensionMismatch {
                expected: l,
                found: bad.len(),
            });
        }
        let basis = DMatrix::from_fn(l, p, |t, i| parts.basis[i][t]);
        let coefficients = parts
            .coefficients
            .into_iter()
            .map(GpModel::from_parts)
            .collect::<Result<Vec<_>>>()?;
        Ok(SvdGpModel {
            basis,
            coefficients,
            singular_values: parts.singular_values,
            residual_var: parts.residual_var,
            center: parts.center,
            x: parts.x,
        })
    }
}

/// Options specific to the SVD emulator.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdGpOptions {
    pub frac: f64,
    /// Subtract the per-time mean series before decomposing.
    pub center: bool,
    pub fit: FitOptions,
}

impl Default for SvdGpOptions {
    fn default() -> Self {
        SvdGpOptions {
            frac: 0.95,
            center: false,
            fit: FitOptions::default(),
        }
    }
}

pub fn fit_svdgp(x: &Design, y: &ResponseMatrix, template: &CorrelationSpec, opts: &SvdGpOptions) -> Result<SvdGpModel> {
    if x.n() != y.runs() {
        return Err(Error::Alignment {
            design_rows: x.n(),
            response_runs: y.runs(),
        });
    }
    let (l, n) = (y.len(), y.runs());
    let center: Vec<f64> = if opts.center {
        (0..l).map(|t| y.as_matrix().row(t).sum() / n as f64).collect()
    } else {
        vec![0.0; l]
    };
    let centered = DMatrix::from_fn(l, n, |t, j| y.as_matrix()[(t, j)] - center[t]);
    let svd = svd_general(&centered)?;
    let p = select_p(&svd.singular_values, opts.frac)?;
    let basis = DMatrix::from_fn(l, p, |t, i| svd.singular_values[i] * svd.left_vectors[(t, i)]);

    let coefficients = (0..p)
        .into_par_iter()
        .map(|i| {
            let targets: Vec<f64> = (0..n).map(|j| svd.right_vectors[(j, i)]).collect();
            let fo = opts.fit.clone().with_seed(derive_seed(opts.fit.seed, i as u64));
            fit_simple(x, &targets, template, &fo)
        })
        .collect::<Result<Vec<_>>>()?;

    // truncation residual Y − B·V_pᵀ
    let mut sq = 0.0;
    for j in 0..n {
        for t in 0..l {
            let approx: f64 = (0..p).map(|i| basis[(t, i)] * svd.right_vectors[(j, i)]).sum();
            let e = centered[(t, j)] - approx;
            sq += e * e;
        }
    }
    Ok(SvdGpModel {
        basis,
        coefficients,
        singular_values: svd.singular_values,
        residual_var: sq / (l * n) as f64,
        center,
        x: x.clone(),
    })
}

/// Mean and variance series at `x0`:
/// `mean_t = Σᵢ ĉᵢ(x₀)B_{t,i}`, `var_t = Σᵢ sᵢ²(x₀)B_{t,i}² + σ²`.
pub fn predict_svdgp(model: &SvdGpModel, x0: &[f64], m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let preds = model
        .coefficients
        .iter()
        .map(|g| g.predict(x0, m))
        .collect::<Result<Vec<_>>>()?;
    let l = model.series_len();
    let mut mean = model.center.clone();
    let mut var = vec![model.residual_var; l];
    for (i, pr) in preds.iter().enumerate() {
        for t in 0..l {
            let b = model.basis[(t, i)];
            mean[t] += pr.mean * b;
            var[t] += pr.variance * b * b;
        }
    }
    Ok((mean, var))
}
