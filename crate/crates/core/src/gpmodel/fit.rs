//! Profile deviance, nugget policy and the multistart fitter.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::kmeans::kmeans;
use super::optim::minimize_box;
use super::{BasisFunction, FitOptions, GpModel, MeanMode, ModelParts};
use crate::design::{lhd, Design};
use crate::error::{Error, Result};
use crate::kernels::{corr_matrix, CorrelationSpec};
use crate::linalg::{cholesky, log_det, nugget_lower_bound, symmetric_eigenvalues, CholFactor, SymMatrix};
use crate::rng::{derive_seed, rng_from_seed};

/// Smallest nugget tried in noisy fits.
const NOISY_DELTA_FLOOR: f64 = 1e-8;
/// Residual RMS below this fraction of `max|y|` marks a degenerate response.
const DEGENERATE_REL: f64 = 1e-8;

fn row_sum_norm(m: &SymMatrix) -> f64 {
    m.as_matrix()
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Chooses the nugget for `R` and factors `R + δI`.
///
/// `δ` starts at `floor`. If that factorization succeeds and the cheap bound
/// `κ ≤ ‖R_δ‖_∞·trace(R_δ⁻¹)` already meets `κ_max`, it is kept. Otherwise the
/// eigenvalues are computed and `δ` is raised to the lower bound, with the
/// extreme eigenvalues widened by their rounding error so that the target
/// holds for the exact spectrum too.
pub fn stabilize(r: &SymMatrix, floor: f64, kappa_max: f64) -> Result<(f64, CholFactor)> {
    if !(kappa_max > 1.0) {
        return Err(Error::InvalidKappaMax(kappa_max));
    }
    let n = r.n();
    let norm = row_sum_norm(r);
    if let Ok(f) = cholesky(&r.with_nugget(floor)) {
        // λmax ≤ ‖R‖∞ gives κ ≤ (‖R‖∞ + δ)/δ without any spectral information
        if floor > 0.0 && (norm + floor) / floor <= kappa_max {
            return Ok((floor, f));
        }
        if (norm + floor) * f.inverse_frobenius_sq() <= kappa_max {
            return Ok((floor, f));
        }
    }
    let eigs = symmetric_eigenvalues(r);
    let slack = 2.0 * n as f64 * f64::EPSILON * norm;
    let widened = [eigs[0] + slack, eigs[n - 1] - slack];
    let delta = nugget_lower_bound(&widened, kappa_max)?.max(floor);
    let f = cholesky(&r.with_nugget(delta))?;
    Ok((delta, f))
}

/// Generalized least squares in whitened form. Returns `(γ̂, σ̂²)` with
/// `σ̂² = (Y − Fγ̂)ᵀR⁻¹(Y − Fγ̂)/n`.
pub(crate) fn gls(factor: &CholFactor, x: &Design, y: &[f64], basis: &[BasisFunction]) -> Result<(Vec<f64>, f64)> {
    let n = y.len();
    let mut w = y.to_vec();
    factor.forward_in_place(&mut w);
    let q = basis.len();
    if q == 0 {
        return Ok((Vec::new(), w.iter().map(|v| v * v).sum::<f64>() / n as f64));
    }
    let cols: Vec<Vec<f64>> = basis
        .iter()
        .map(|f| {
            let mut c: Vec<f64> = x.rows().map(|row| f.eval(row)).collect();
            factor.forward_in_place(&mut c);
            c
        })
        .collect();
    let gram = DMatrix::from_fn(q, q, |i, j| crate::linalg::dot(&cols[i], &cols[j]));
    let rhs: Vec<f64> = cols.iter().map(|c| crate::linalg::dot(c, &w)).collect();
    let gamma = if q == 1 {
        if !(gram[(0, 0)] > 0.0) {
            return Err(Error::RankDeficientBasis);
        }
        vec![rhs[0] / gram[(0, 0)]]
    } else {
        let chol = gram.clone().cholesky().ok_or(Error::RankDeficientBasis)?;
        let l = chol.l();
        let dmax = (0..q).map(|i| gram[(i, i)]).fold(0.0, f64::max);
        if (0..q).any(|i| l[(i, i)] * l[(i, i)] <= 1e-13 * dmax) {
            return Err(Error::RankDeficientBasis);
        }
        chol.solve(&nalgebra::DVector::from_vec(rhs)).iter().copied().collect()
    };
    for (j, c) in cols.iter().enumerate() {
        let g = gamma[j];
        w.iter_mut().zip(c).for_each(|(wi, ci)| *wi -= g * ci);
    }
    Ok((gamma, w.iter().map(|v| v * v).sum::<f64>() / n as f64))
}

/// `μ̂ = (1ᵀR⁻¹1)⁻¹ 1ᵀR⁻¹Y`.
pub fn mu_hat(factor: &CholFactor, y: &[f64]) -> Result<f64> {
    check_len(factor.n(), y.len())?;
    let ones = Design::new(y.len(), 1, vec![0.0; y.len()])?;
    Ok(gls(factor, &ones, y, &[BasisFunction::Constant])?.0[0])
}

/// `σ̂² = (Y − 1μ)ᵀR⁻¹(Y − 1μ)/n`.
pub fn sigma2_hat(factor: &CholFactor, y: &[f64], mu: f64) -> Result<f64> {
    check_len(factor.n(), y.len())?;
    let mut z: Vec<f64> = y.iter().map(|v| v - mu).collect();
    factor.forward_in_place(&mut z);
    Ok(z.iter().map(|v| v * v).sum::<f64>() / y.len() as f64)
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// What is being fitted; shared by every entry point.
struct Problem<'a> {
    x: &'a Design,
    y: &'a [f64],
    template: &'a CorrelationSpec,
    basis: &'a [BasisFunction],
    noisy: bool,
    opts: &'a FitOptions,
}

struct Evaluation {
    spec: CorrelationSpec,
    delta: f64,
    gamma: Vec<f64>,
    sigma2: f64,
    deviance: f64,
}

impl Problem<'_> {
    fn beta_dims(&self) -> usize {
        if self.template.uses_beta() {
            self.template.d()
        } else {
            0
        }
    }

    fn dims(&self) -> usize {
        self.beta_dims() + usize::from(self.noisy)
    }

    fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let (blo, bhi) = self.opts.beta_range;
        let mut lo = vec![blo; self.beta_dims()];
        let mut hi = vec![bhi; self.beta_dims()];
        if self.noisy {
            lo.push(NOISY_DELTA_FLOOR.log10());
            hi.push(self.opts.delta_max.log10());
        }
        (lo, hi)
    }

    fn evaluate(&self, v: &[f64]) -> Result<Evaluation> {
        let nb = self.beta_dims();
        let spec = if nb > 0 {
            self.template.with_beta(&v[..nb])?
        } else {
            self.template.clone()
        };
        let floor = if self.noisy {
            10f64.powf(v[nb]).max(NOISY_DELTA_FLOOR)
        } else {
            0.0
        };
        let r = corr_matrix(&spec, self.x)?;
        let (delta, factor) = stabilize(&r, floor, self.opts.kappa_max)?;
        let (gamma, sigma2) = gls(&factor, self.x, self.y, self.basis)?;
        let n = self.y.len() as f64;
        let deviance = log_det(&factor) + n * sigma2.ln() + n;
        Ok(Evaluation {
            spec,
            delta,
            gamma,
            sigma2,
            deviance,
        })
    }

    /// Deviance with failures and degenerate values mapped to `+∞`.
    fn objective(&self, v: &[f64]) -> f64 {
        match self.evaluate(v) {
            Ok(e) if e.deviance.is_finite() => e.deviance,
            _ => f64::INFINITY,
        }
    }

    fn mean_mode(&self) -> MeanMode {
        match self.basis {
            [] => MeanMode::Simple,
            [BasisFunction::Constant] => MeanMode::Ordinary,
            _ => MeanMode::Universal,
        }
    }

    fn build(&self, e: Evaluation, degenerate: bool) -> Result<GpModel> {
        GpModel::from_parts(ModelParts {
            spec: e.spec,
            x: self.x.clone(),
            y: self.y.to_vec(),
            mean_mode: self.mean_mode(),
            basis: self.basis.to_vec(),
            gamma_hat: e.gamma,
            sigma2_hat: e.sigma2,
            delta: e.delta,
            kappa_max: self.opts.kappa_max,
            deviance: (!degenerate).then_some(e.deviance),
            degenerate,
            noisy: self.noisy,
            bounds: None,
        })
    }

    /// A response the mean model reproduces exactly: `σ̂² = 0`, parameters at
    /// the box center.
    fn degenerate(&self, center: &[f64]) -> Result<Option<GpModel>> {
        let scale = self.y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let first = self.y[0];
        let constant = self.y.iter().all(|v| *v == first);
        let mut e = self.evaluate(center)?;
        if !(constant && !self.basis.is_empty()) && e.sigma2 > (DEGENERATE_REL * scale).powi(2) {
            return Ok(None);
        }
        if constant && !self.basis.is_empty() {
            e.gamma.iter_mut().for_each(|g| *g = 0.0);
            e.gamma[0] = first;
        }
        e.sigma2 = 0.0;
        e.deviance = f64::NEG_INFINITY;
        self.build(e, true).map(Some)
    }

    fn run(&self) -> Result<GpModel> {
        self.opts.validate()?;
        validate_data(self.x, self.y, self.template, if self.noisy { 3 } else { 2 })?;
        let (lo, hi) = self.bounds();
        let dims = self.dims();
        let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        if let Some(m) = self.degenerate(&center)? {
            return Ok(m);
        }
        if dims == 0 {
            let e = self.evaluate(&[])?;
            return self.build(e, false);
        }

        let seed = self.opts.seed;
        let n_cand = self.opts.candidates_per_dim * dims;
        let n_keep = self.opts.keep_per_dim * dims;
        let n_clusters = self.opts.clusters_per_dim * dims;

        let unit = lhd(n_cand, dims, derive_seed(seed, 0))?;
        let candidates: Vec<Vec<f64>> = unit
            .rows()
            .map(|u| (0..dims).map(|k| lo[k] + u[k] * (hi[k] - lo[k])).collect())
            .collect();
        let devs: Vec<f64> = candidates.par_iter().map(|v| self.objective(v)).collect();
        let mut order: Vec<usize> = (0..n_cand).filter(|&i| devs[i].is_finite()).collect();
        if order.is_empty() {
            return Err(Error::NumericalIntegrity(
                "deviance is not finite anywhere in the search box".into(),
            ));
        }
        order.sort_by(|&a, &b| devs[a].total_cmp(&devs[b]).then(a.cmp(&b)));
        order.truncate(n_keep);
        let kept: Vec<Vec<f64>> = order.iter().map(|&i| candidates[i].clone()).collect();
        let mut rng = rng_from_seed(derive_seed(seed, 1));
        let starts = kmeans(&kept, n_clusters, self.opts.kmeans_iters, &mut rng);

        let locals: Vec<(f64, Vec<f64>)> = starts
            .par_iter()
            .map(|s| {
                let r = minimize_box(
                    |v| self.objective(v),
                    s,
                    &lo,
                    &hi,
                    self.opts.fd_step,
                    self.opts.step_tol,
                    self.opts.grad_tol,
                    self.opts.max_iter,
                );
                (r.f, r.x)
            })
            .collect();
        // deterministic reduction: lowest deviance, then lowest start index;
        // the best seed point competes too so the result never loses to it
        let mut best = (devs[order[0]], candidates[order[0]].clone());
        for (f, x) in locals {
            if f < best.0 {
                best = (f, x);
            }
        }
        let e = self.evaluate(&best.1)?;
        self.build(e, false)
    }
}

fn validate_data(x: &Design, y: &[f64], template: &CorrelationSpec, min_n: usize) -> Result<()> {
    if y.len() != x.n() {
        return Err(Error::DimensionMismatch {
            expected: x.n(),
            found: y.len(),
        });
    }
    if template.d() != x.d() {
        return Err(Error::DimensionMismatch {
            expected: x.d(),
            found: template.d(),
        });
    }
    if x.n() < min_n {
        return Err(Error::TooFewPoints {
            required: min_n,
            found: x.n(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("responses must be finite".into()));
    }
    Ok(())
}

/// Ordinary kriging fit by multistart deviance minimization over `β`.
pub fn fit(x: &Design, y: &[f64], template: &CorrelationSpec, opts: &FitOptions) -> Result<GpModel> {
    Problem {
        x,
        y,
        template,
        basis: &[BasisFunction::Constant],
        noisy: false,
        opts,
    }
    .run()
}

/// Simple kriging (known zero mean).
pub fn fit_simple(x: &Design, y: &[f64], template: &CorrelationSpec, opts: &FitOptions) -> Result<GpModel> {
    Problem {
        x,
        y,
        template,
        basis: &[],
        noisy: false,
        opts,
    }
    .run()
}

/// Universal kriging with basis `f₀ ≡ 1, f₁, …, f_m`.
pub fn fit_universal(
    x: &Design,
    y: &[f64],
    basis: &[BasisFunction],
    template: &CorrelationSpec,
    opts: &FitOptions,
) -> Result<GpModel> {
    if basis.first() != Some(&BasisFunction::Constant) {
        return Err(Error::Domain("the first basis function must be the constant".into()));
    }
    if let Some(k) = basis.iter().filter_map(|b| b.coord()).find(|&k| k >= x.d()) {
        return Err(Error::Domain(format!("basis refers to coordinate {k} beyond d = {}", x.d())));
    }
    check_full_rank(x, basis)?;
    Problem {
        x,
        y,
        template,
        basis,
        noisy: false,
        opts,
    }
    .run()
}

fn check_full_rank(x: &Design, basis: &[BasisFunction]) -> Result<()> {
    let q = basis.len();
    if q > x.n() {
        return Err(Error::RankDeficientBasis);
    }
    let f = DMatrix::from_fn(x.n(), q, |i, j| basis[j].eval(x.row(i)));
    let sv = f.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    if sv.iter().any(|s| *s <= 1e-10 * max) {
        return Err(Error::RankDeficientBasis);
    }
    Ok(())
}

/// Ordinary kriging with observation noise: the nugget `δ = σ_ε²/σ_z²` is
/// estimated jointly with `β` over `[max(δ_lb, 1e−8), δ_max]`.
pub fn fit_noisy(x: &Design, y: &[f64], template: &CorrelationSpec, opts: &FitOptions) -> Result<GpModel> {
    Problem {
        x,
        y,
        template,
        basis: &[BasisFunction::Constant],
        noisy: true,
        opts,
    }
    .run()
}

/// Profile deviance `log|R_δ| + n log σ̂² + n` of an ordinary-kriging model
/// at `β`, with `δ` from the nugget policy. `+∞` when it cannot be evaluated.
pub fn deviance(beta: &[f64], x: &Design, y: &[f64], template: &CorrelationSpec, opts: &FitOptions) -> f64 {
    let p = Problem {
        x,
        y,
        template,
        basis: &[BasisFunction::Constant],
        noisy: false,
        opts,
    };
    if beta.len() != template.d() || x.d() != template.d() || y.len() != x.n() {
        return f64::INFINITY;
    }
    if template.uses_beta() {
        p.objective(beta)
    } else {
        p.objective(&[])
    }
}
