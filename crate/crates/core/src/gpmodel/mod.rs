//! Scalar GP models: fitting, prediction and persistence.
//!
//! The response is modelled as `y(x) = f(x)ᵀγ + z(x)` with `z` a zero-mean GP
//! of variance `σ_z²` and correlation `R`. `Simple` fixes the mean at zero,
//! `Ordinary` uses a constant and `Universal` an arbitrary basis whose first
//! function is the constant. All solves go through a Cholesky factor of
//! `R + δI`, where the nugget `δ` keeps the condition number below `κ_max`.

mod fit;
mod kmeans;
mod optim;
mod persist;

use serde::{Deserialize, Serialize};

use crate::design::{Bounds, Design};
use crate::error::{Error, Result};
use crate::kernels::{corr_matrix, cross_corr, CorrelationSpec};
use crate::linalg::{cholesky, dot, CholFactor};

pub use fit::{deviance, fit, fit_noisy, fit_simple, fit_universal, mu_hat, sigma2_hat, stabilize};
pub use kmeans::kmeans;
pub use optim::{minimize_box, BoxResult};
pub use persist::{load_model, save_model, SCHEMA_VERSION};

/// Normalized variances down to this value are treated as rounding noise and
/// clamped to zero; anything more negative is an error.
const VARIANCE_CLAMP: f64 = -1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeanMode {
    Simple,
    Ordinary,
    Universal,
}

/// Regression functions for universal kriging.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "coord", rename_all = "snake_case")]
pub enum BasisFunction {
    Constant,
    /// `x_k`
    Linear(usize),
    /// `x_k²`
    Quadratic(usize),
}

impl BasisFunction {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            BasisFunction::Constant => 1.0,
            BasisFunction::Linear(k) => x[k],
            BasisFunction::Quadratic(k) => x[k] * x[k],
        }
    }

    fn coord(&self) -> Option<usize> {
        match *self {
            BasisFunction::Constant => None,
            BasisFunction::Linear(k) | BasisFunction::Quadratic(k) => Some(k),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub kappa_max: f64,
    pub candidates_per_dim: usize,
    pub keep_per_dim: usize,
    pub clusters_per_dim: usize,
    /// Search box for every `β_k = log10 θ_k`.
    pub beta_range: (f64, f64),
    /// Central-difference step in the search variables.
    pub fd_step: f64,
    pub step_tol: f64,
    pub grad_tol: f64,
    pub max_iter: usize,
    pub kmeans_iters: usize,
    /// Upper bound of the nugget search in noisy fits.
    pub delta_max: f64,
    /// Default number of regularization iterations used by callers that do
    /// not pass one explicitly.
    pub m_iter: usize,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            kappa_max: 1e8,
            candidates_per_dim: 200,
            keep_per_dim: 80,
            clusters_per_dim: 2,
            beta_range: (-2.0, 3.0),
            fd_step: 1e-4,
            step_tol: 1e-6,
            grad_tol: 1e-5,
            max_iter: 100,
            kmeans_iters: 25,
            delta_max: 10.0,
            m_iter: 1,
            seed: 0,
        }
    }
}

impl FitOptions {
    /// Reduced multistart budget (50d / 20d / d) for many small fits.
    pub fn local_default() -> Self {
        FitOptions {
            candidates_per_dim: 50,
            keep_per_dim: 20,
            clusters_per_dim: 1,
            ..Default::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa_max > 1.0) {
            return Err(Error::InvalidKappaMax(self.kappa_max));
        }
        if !(self.candidates_per_dim >= self.keep_per_dim
            && self.keep_per_dim >= self.clusters_per_dim
            && self.clusters_per_dim >= 1)
        {
            return Err(Error::InvalidSize(format!(
                "need candidates >= keep >= clusters >= 1, got {}/{}/{}",
                self.candidates_per_dim, self.keep_per_dim, self.clusters_per_dim
            )));
        }
        let (lo, hi) = self.beta_range;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::DegenerateBounds { coord: 0, lo, hi });
        }
        if !(self.fd_step > 0.0) || !(self.delta_max > 1e-8) {
            return Err(Error::Domain("fd_step must be positive and delta_max above 1e-8".into()));
        }
        if self.m_iter == 0 {
            return Err(Error::Domain("M must be at least 1".into()));
        }
        Ok(())
    }
}

/// BLUP mean and predictive variance at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionResult {
    pub mean: f64,
    pub variance: f64,
    /// Whether a slightly negative variance was clamped to zero.
    pub clamped: bool,
}

impl PredictionResult {
    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Everything needed to rebuild a model; the persisted form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParts {
    pub spec: CorrelationSpec,
    pub x: Design,
    pub y: Vec<f64>,
    pub mean_mode: MeanMode,
    pub basis: Vec<BasisFunction>,
    /// Empty in `Simple` mode; `γ̂₁ = μ̂` otherwise.
    pub gamma_hat: Vec<f64>,
    pub sigma2_hat: f64,
    pub delta: f64,
    pub kappa_max: f64,
    /// `None` for degenerate fits, where `σ̂² = 0` sends it to `−∞`.
    pub deviance: Option<f64>,
    pub degenerate: bool,
    pub noisy: bool,
    pub bounds: Option<Bounds>,
}

/// A fitted scalar GP. Immutable; prediction is safe from any thread.
#[derive(Debug, Clone)]
pub struct GpModel {
    parts: ModelParts,
    factor: CholFactor,
    /// `(R + δI)⁻¹ (Y − Fγ̂)`
    alpha: Vec<f64>,
}

impl GpModel {
    /// Rebuilds the factorization from stored parameters.
    pub fn from_parts(parts: ModelParts) -> Result<Self> {
        let n = parts.x.n();
        if parts.y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: parts.y.len(),
            });
        }
        if parts.spec.d() != parts.x.d() {
            return Err(Error::DimensionMismatch {
                expected: parts.x.d(),
                found: parts.spec.d(),
            });
        }
        if parts.basis.len() != parts.gamma_hat.len() {
            return Err(Error::DimensionMismatch {
                expected: parts.basis.len(),
                found: parts.gamma_hat.len(),
            });
        }
        match parts.mean_mode {
            MeanMode::Simple if !parts.basis.is_empty() => {
                return Err(Error::Domain("simple kriging has no basis".into()))
            }
            MeanMode::Ordinary if parts.basis != [BasisFunction::Constant] => {
                return Err(Error::Domain("ordinary kriging uses the constant basis".into()))
            }
            MeanMode::Universal if parts.basis.first() != Some(&BasisFunction::Constant) => {
                return Err(Error::Domain("universal basis must start with the constant".into()))
            }
            _ => {}
        }
        if let Some(k) = parts.basis.iter().filter_map(BasisFunction::coord).find(|&k| k >= parts.x.d()) {
            return Err(Error::Domain(format!("basis refers to coordinate {k} beyond d = {}", parts.x.d())));
        }
        if !(parts.delta >= 0.0) || !(parts.sigma2_hat >= 0.0) {
            return Err(Error::Domain("delta and sigma2_hat must be nonnegative".into()));
        }
        let r = corr_matrix(&parts.spec, &parts.x)?.with_nugget(parts.delta);
        let factor = cholesky(&r)?;
        let mut alpha = trend_residual(&parts.x, &parts.y, &parts.basis, &parts.gamma_hat);
        factor.solve_in_place(&mut alpha);
        Ok(GpModel { parts, factor, alpha })
    }

    pub fn parts(&self) -> &ModelParts {
        &self.parts
    }

    pub fn spec(&self) -> &CorrelationSpec {
        &self.parts.spec
    }

    pub fn x(&self) -> &Design {
        &self.parts.x
    }

    pub fn y(&self) -> &[f64] {
        &self.parts.y
    }

    pub fn n(&self) -> usize {
        self.parts.x.n()
    }

    pub fn d(&self) -> usize {
        self.parts.x.d()
    }

    pub fn beta(&self) -> &[f64] {
        self.parts.spec.beta()
    }

    /// Constant-mean estimate; 0 in `Simple` mode.
    pub fn mu_hat(&self) -> f64 {
        self.parts.gamma_hat.first().copied().unwrap_or(0.0)
    }

    pub fn gamma_hat(&self) -> &[f64] {
        &self.parts.gamma_hat
    }

    pub fn sigma2_hat(&self) -> f64 {
        self.parts.sigma2_hat
    }

    pub fn delta(&self) -> f64 {
        self.parts.delta
    }

    /// Estimated noise variance `δ·σ̂_z²` (meaningful for noisy fits).
    pub fn noise_variance(&self) -> f64 {
        self.parts.delta * self.parts.sigma2_hat
    }

    pub fn mean_mode(&self) -> MeanMode {
        self.parts.mean_mode
    }

    pub fn deviance(&self) -> f64 {
        self.parts.deviance.unwrap_or(f64::NEG_INFINITY)
    }

    pub fn is_degenerate(&self) -> bool {
        self.parts.degenerate
    }

    pub fn is_noisy(&self) -> bool {
        self.parts.noisy
    }

    pub fn bounds(&self) -> Option<&Bounds> {
        self.parts.bounds.as_ref()
    }

    pub fn set_bounds(&mut self, bounds: Option<Bounds>) {
        self.parts.bounds = bounds;
    }

    pub fn factor(&self) -> &CholFactor {
        &self.factor
    }

    /// `κ(R + δI)` of the fitted correlation matrix.
    pub fn condition_number(&self) -> Result<f64> {
        let r = corr_matrix(&self.parts.spec, &self.parts.x)?.with_nugget(self.parts.delta);
        Ok(crate::linalg::condition_number(&r))
    }

    fn trend(&self, x0: &[f64]) -> f64 {
        self.parts
            .basis
            .iter()
            .zip(&self.parts.gamma_hat)
            .map(|(f, g)| f.eval(x0) * g)
            .sum()
    }

    /// Weights `α_M` such that the `M`-step mean is `f(x₀)ᵀγ̂ + r(x₀)ᵀα_M`.
    ///
    /// Step `m` fits the smoother to the training residuals left by step
    /// `m − 1` and adds the correction. Because `R(R + δI)⁻¹ = I − δ(R + δI)⁻¹`,
    /// the residuals obey `e_m = δ(R + δI)⁻¹e_{m−1}` and shrink to zero.
    pub fn weights(&self, m: usize) -> Result<Vec<f64>> {
        if m == 0 {
            return Err(Error::Domain("M must be at least 1".into()));
        }
        let mut alpha = self.alpha.clone();
        if m == 1 || self.parts.delta == 0.0 {
            return Ok(alpha);
        }
        let delta = self.parts.delta;
        // current correction term, R_δ⁻¹ e_{k}
        let mut step = self.alpha.clone();
        for _ in 1..m {
            step.iter_mut().for_each(|v| *v *= delta);
            self.factor.solve_in_place(&mut step);
            alpha.iter_mut().zip(&step).for_each(|(a, s)| *a += s);
        }
        Ok(alpha)
    }

    fn check_point(&self, x0: &[f64]) -> Result<()> {
        if x0.len() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                found: x0.len(),
            });
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("prediction point must be finite".into()));
        }
        Ok(())
    }

    fn predict_with(&self, x0: &[f64], alpha: &[f64]) -> Result<PredictionResult> {
        self.check_point(x0)?;
        let mut r = cross_corr(&self.parts.spec, &self.parts.x, x0)?;
        let mean = self.trend(x0) + dot(&r, alpha);
        self.factor.forward_in_place(&mut r);
        let reduction = 1.0 - dot(&r, &r);
        let (unit_var, clamped) = if reduction >= 0.0 {
            (reduction, false)
        } else if reduction >= VARIANCE_CLAMP {
            (0.0, true)
        } else {
            return Err(Error::NumericalIntegrity(format!(
                "predictive variance ratio {reduction:e} is below the clamp threshold"
            )));
        };
        Ok(PredictionResult {
            mean,
            variance: self.parts.sigma2_hat * unit_var,
            clamped,
        })
    }

    /// Mean after `m` regularization steps; variance always from the
    /// single-step formula `σ̂_z²(1 − rᵀ(R + δI)⁻¹r)`.
    pub fn predict(&self, x0: &[f64], m: usize) -> Result<PredictionResult> {
        let alpha = self.weights(m)?;
        self.predict_with(x0, &alpha)
    }

    pub fn predict_batch<'a>(
        &self,
        points: impl IntoIterator<Item = &'a [f64]>,
        m: usize,
    ) -> Result<Vec<PredictionResult>> {
        let alpha = self.weights(m)?;
        points.into_iter().map(|x0| self.predict_with(x0, &alpha)).collect()
    }

    /// Largest `|ŷ(xᵢ) − yᵢ|` over the training points.
    pub fn max_training_residual(&self, m: usize) -> Result<f64> {
        let preds = self.predict_batch(self.parts.x.rows(), m)?;
        Ok(preds
            .iter()
            .zip(&self.parts.y)
            .map(|(p, y)| (p.mean - y).abs())
            .fold(0.0, f64::max))
    }
}

fn trend_residual(x: &Design, y: &[f64], basis: &[BasisFunction], gamma: &[f64]) -> Vec<f64> {
    x.rows()
        .zip(y)
        .map(|(row, yi)| yi - basis.iter().zip(gamma).map(|(f, g)| f.eval(row) * g).sum::<f64>())
        .collect()
}
