//! Product correlation functions and the matrices built from them.
//!
//! Range hyperparameters are stored as `β = log10 θ`. The correlation-length
//! (`λ = 1/θ`) and `ρ` (`θ = −4 log ρ`) parametrizations are available as
//! conversions only.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::design::Design;
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

/// Supported Matérn smoothness values (closed-form half-integer cases).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaternNu {
    Half,
    ThreeHalves,
    FiveHalves,
}

impl MaternNu {
    pub fn from_f64(nu: f64) -> Result<Self> {
        match nu {
            0.5 => Ok(MaternNu::Half),
            1.5 => Ok(MaternNu::ThreeHalves),
            2.5 => Ok(MaternNu::FiveHalves),
            other => Err(Error::UnsupportedNu(other)),
        }
    }

    pub fn value(self) -> f64 {
        match self {
            MaternNu::Half => 0.5,
            MaternNu::ThreeHalves => 1.5,
            MaternNu::FiveHalves => 2.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelFamily {
    /// `exp(−Σ θₖ |hₖ|^pₖ)`, `pₖ ∈ [1, 2]`.
    PowerExponential { power: Vec<f64> },
    /// Product of one-dimensional Matérn terms in `t = √(2ν)·|hₖ|·θₖ`.
    Matern { nu: MaternNu },
    /// `(1 − h/τ)cos(πh/τ) + sin(πh/τ)/π` for `h < τ`, zero beyond.
    CompactSupport { tau: Vec<f64> },
}

impl KernelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            KernelFamily::PowerExponential { .. } => "powexp",
            KernelFamily::Matern { .. } => "matern",
            KernelFamily::CompactSupport { .. } => "compact",
        }
    }
}

/// Kernel family plus hyperparameters for a `d`-dimensional input space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSpec {
    #[serde(flatten)]
    family: KernelFamily,
    beta: Vec<f64>,
}

impl CorrelationSpec {
    pub fn new(family: KernelFamily, beta: Vec<f64>) -> Result<Self> {
        let d = beta.len();
        if d == 0 {
            return Err(Error::InvalidSize("correlation spec needs d >= 1".into()));
        }
        if let Some(b) = beta.iter().find(|b| !b.is_finite()) {
            return Err(Error::Domain(format!("beta must be finite, got {b}")));
        }
        match &family {
            KernelFamily::PowerExponential { power } => {
                if power.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: power.len(),
                    });
                }
                if let Some(p) = power.iter().find(|p| !(1.0..=2.0).contains(*p)) {
                    return Err(Error::Domain(format!("power must lie in [1, 2], got {p}")));
                }
            }
            KernelFamily::Matern { .. } => {}
            KernelFamily::CompactSupport { tau } => {
                if tau.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: tau.len(),
                    });
                }
                if let Some(t) = tau.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
                    return Err(Error::Domain(format!("tau must be positive, got {t}")));
                }
            }
        }
        Ok(CorrelationSpec { family, beta })
    }

    /// Power-exponential with a common power for every coordinate.
    pub fn power_exponential(beta: Vec<f64>, power: f64) -> Result<Self> {
        let d = beta.len();
        Self::new(
            KernelFamily::PowerExponential {
                power: vec![power; d],
            },
            beta,
        )
    }

    /// The Gaussian kernel (`p = 2`).
    pub fn gaussian(beta: Vec<f64>) -> Result<Self> {
        Self::power_exponential(beta, 2.0)
    }

    pub fn matern(beta: Vec<f64>, nu: f64) -> Result<Self> {
        Self::new(
            KernelFamily::Matern {
                nu: MaternNu::from_f64(nu)?,
            },
            beta,
        )
    }

    /// Compactly supported kernel. `β` is carried for interface uniformity
    /// but has no effect on correlations.
    pub fn compact(tau: Vec<f64>) -> Result<Self> {
        let d = tau.len();
        Self::new(KernelFamily::CompactSupport { tau }, vec![0.0; d])
    }

    pub fn family(&self) -> &KernelFamily {
        &self.family
    }

    pub fn d(&self) -> usize {
        self.beta.len()
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn theta(&self) -> Vec<f64> {
        self.beta.iter().map(|&b| theta_from_beta(b)).collect()
    }

    /// Whether `β` influences the correlation (false for compact support).
    pub fn uses_beta(&self) -> bool {
        !matches!(self.family, KernelFamily::CompactSupport { .. })
    }

    pub fn with_beta(&self, beta: &[f64]) -> Result<Self> {
        if beta.len() != self.d() {
            return Err(Error::DimensionMismatch {
                expected: self.d(),
                found: beta.len(),
            });
        }
        Self::new(self.family.clone(), beta.to_vec())
    }

    pub(crate) fn evaluator(&self) -> CorrEvaluator<'_> {
        CorrEvaluator {
            family: &self.family,
            theta: self.theta(),
        }
    }
}

/// Spec with `θ` precomputed, for inner loops.
pub(crate) struct CorrEvaluator<'a> {
    family: &'a KernelFamily,
    theta: Vec<f64>,
}

impl CorrEvaluator<'_> {
    #[inline]
    pub(crate) fn eval(&self, xi: &[f64], xj: &[f64]) -> f64 {
        match self.family {
            KernelFamily::PowerExponential { power } => {
                let mut s = 0.0;
                for k in 0..xi.len() {
                    let h = (xi[k] - xj[k]).abs();
                    let p = power[k];
                    let hp = if p == 2.0 {
                        h * h
                    } else if p == 1.0 {
                        h
                    } else {
                        h.powf(p)
                    };
                    s += self.theta[k] * hp;
                }
                (-s).exp()
            }
            KernelFamily::Matern { nu } => {
                let mut prod = 1.0;
                for k in 0..xi.len() {
                    let h = (xi[k] - xj[k]).abs();
                    prod *= matern_1d(*nu, h * self.theta[k]);
                }
                prod
            }
            KernelFamily::CompactSupport { tau } => {
                let mut prod = 1.0;
                for k in 0..xi.len() {
                    let h = (xi[k] - xj[k]).abs();
                    if h >= tau[k] {
                        return 0.0;
                    }
                    let u = h / tau[k];
                    prod *= (1.0 - u) * (PI * u).cos() + (PI * u).sin() / PI;
                }
                prod
            }
        }
    }
}

/// Matérn correlation at scaled distance `s = θ·|h|`.
#[inline]
fn matern_1d(nu: MaternNu, s: f64) -> f64 {
    match nu {
        MaternNu::Half => (-s).exp(),
        MaternNu::ThreeHalves => {
            let t = 3.0_f64.sqrt() * s;
            (1.0 + t) * (-t).exp()
        }
        MaternNu::FiveHalves => {
            let t = 5.0_f64.sqrt() * s;
            (1.0 + t + t * t / 3.0) * (-t).exp()
        }
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub fn corr(spec: &CorrelationSpec, xi: &[f64], xj: &[f64]) -> Result<f64> {
    check_dim(spec.d(), xi.len())?;
    check_dim(spec.d(), xj.len())?;
    if xi.iter().chain(xj).any(|v| !v.is_finite()) {
        return Err(Error::Domain("points must have finite coordinates".into()));
    }
    Ok(spec.evaluator().eval(xi, xj))
}

/// `R_n` with unit diagonal.
pub fn corr_matrix(spec: &CorrelationSpec, x: &Design) -> Result<SymMatrix> {
    check_dim(spec.d(), x.d())?;
    let ev = spec.evaluator();
    Ok(SymMatrix::from_lower_fn(x.n(), |i, j| {
        if i == j {
            1.0
        } else {
            ev.eval(x.row(i), x.row(j))
        }
    }))
}

/// `r(x0)`, the correlations between each design point and `x0`.
pub fn cross_corr(spec: &CorrelationSpec, x: &Design, x0: &[f64]) -> Result<Vec<f64>> {
    check_dim(spec.d(), x.d())?;
    check_dim(spec.d(), x0.len())?;
    let ev = spec.evaluator();
    Ok(x.rows().map(|xi| ev.eval(xi, x0)).collect())
}

pub fn theta_from_beta(beta: f64) -> f64 {
    10f64.powf(beta)
}

pub fn beta_from_theta(theta: f64) -> Result<f64> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::Domain(format!("theta must be positive, got {theta}")));
    }
    Ok(theta.log10())
}

pub fn theta_from_lambda(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    Ok(1.0 / lambda)
}

pub fn lambda_from_theta(theta: f64) -> Result<f64> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::Domain(format!("theta must be positive, got {theta}")));
    }
    Ok(1.0 / theta)
}

pub fn theta_from_rho(rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!("rho must lie in (0, 1), got {rho}")));
    }
    Ok(-4.0 * rho.ln())
}

pub fn rho_from_theta(theta: f64) -> Result<f64> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::Domain(format!("theta must be positive, got {theta}")));
    }
    Ok((-theta / 4.0).exp())
}
