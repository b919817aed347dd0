//! Reconstruction-accuracy study of LU, QR, Cholesky and SVD on random
//! Gaussian correlation matrices.

use std::fmt::Write as _;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{cholesky, svd, SymMatrix};
use crate::design::lhd;
use crate::error::{Error, Result};
use crate::kernels::{corr_matrix, CorrelationSpec};
use crate::rng::{derive_seed, rng_from_seed};

/// Range of `β = log10 θ` drawn for each trial.
const BETA_RANGE: (f64, f64) = (-2.0, 3.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Lu,
    Qr,
    Cholesky,
    Svd,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Lu, Method::Qr, Method::Cholesky, Method::Svd];

    pub fn name(self) -> &'static str {
        match self {
            Method::Lu => "LU",
            Method::Qr => "QR",
            Method::Cholesky => "Cholesky",
            Method::Svd => "SVD",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub method: Method,
    pub n: usize,
    pub d: usize,
    pub trials: usize,
    /// Mean of the max-abs reconstruction error over successful trials
    /// (NaN if none succeeded).
    pub mean_recon_err: f64,
    pub max_recon_err: f64,
    pub mean_time_s: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchmarkRow>,
    /// Always `"max_abs"`: `max_ij |R*_ij − R_ij|`.
    pub error_norm: String,
}

impl BenchmarkReport {
    pub fn row(&self, method: Method) -> &BenchmarkRow {
        self.rows
            .iter()
            .find(|r| r.method == method)
            .expect("every method has a row")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,n,d,trials,mean_recon_err,max_recon_err,mean_time_s,failures\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{:e},{:e},{:e},{}",
                r.method.name(),
                r.n,
                r.d,
                r.trials,
                r.mean_recon_err,
                r.max_recon_err,
                r.mean_time_s,
                r.failures
            );
        }
        out
    }
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Factorizes and reconstructs; returns `(error, factorization seconds)`, or
/// `None` when the factorization fails.
fn run(method: Method, r: &SymMatrix) -> Option<(f64, f64)> {
    let a = r.as_matrix();
    let t0 = Instant::now();
    let recon = match method {
        Method::Lu => {
            let lu = a.clone().lu();
            let elapsed = t0.elapsed().as_secs_f64();
            let (p, l, u) = lu.unpack();
            let mut prod = l * u;
            p.inv_permute_rows(&mut prod);
            return Some((max_abs_diff(&prod, a), elapsed));
        }
        Method::Qr => {
            let qr = a.clone().qr();
            let elapsed = t0.elapsed().as_secs_f64();
            let prod = qr.q() * qr.r();
            return Some((max_abs_diff(&prod, a), elapsed));
        }
        Method::Cholesky => {
            let f = cholesky(r).ok()?;
            let elapsed = t0.elapsed().as_secs_f64();
            let l = f.l();
            (l.clone() * l.transpose(), elapsed)
        }
        Method::Svd => {
            let s = svd(r).ok()?;
            let elapsed = t0.elapsed().as_secs_f64();
            (s.reconstruct(), elapsed)
        }
    };
    Some((max_abs_diff(&recon.0, a), recon.1))
}

/// Runs every method over `trials` correlation matrices built from an
/// `n`-point LHD in `d` dimensions with `β` drawn uniformly from `[−2, 3]^d`.
/// Failed factorizations are counted, not averaged.
pub fn decomposition_benchmark(n: usize, d: usize, trials: usize, seed: u64) -> Result<BenchmarkReport> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("benchmark needs n >= 2, got {n}")));
    }
    if trials < 1 {
        return Err(Error::InvalidSize("benchmark needs trials >= 1".into()));
    }
    if d < 1 {
        return Err(Error::InvalidSize("benchmark needs d >= 1".into()));
    }
    let mut errs = vec![Vec::new(); 4];
    let mut times = vec![Vec::new(); 4];
    let mut failures = [0usize; 4];
    for t in 0..trials as u64 {
        let x = lhd(n, d, derive_seed(seed, 2 * t))?;
        let mut rng = rng_from_seed(derive_seed(seed, 2 * t + 1));
        let beta: Vec<f64> = (0..d).map(|_| rng.random_range(BETA_RANGE.0..BETA_RANGE.1)).collect();
        let r = corr_matrix(&CorrelationSpec::gaussian(beta)?, &x)?;
        for (k, method) in Method::ALL.iter().enumerate() {
            match run(*method, &r) {
                Some((e, s)) if e.is_finite() => {
                    errs[k].push(e);
                    times[k].push(s);
                }
                _ => failures[k] += 1,
            }
        }
    }
    let mean = |v: &[f64]| {
        if v.is_empty() {
            f64::NAN
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };
    let rows = Method::ALL
        .iter()
        .enumerate()
        .map(|(k, &method)| BenchmarkRow {
            method,
            n,
            d,
            trials,
            mean_recon_err: mean(&errs[k]),
            max_recon_err: if errs[k].is_empty() {
                f64::NAN
            } else {
                errs[k].iter().copied().fold(0.0, f64::max)
            },
            mean_time_s: mean(&times[k]),
            failures: failures[k],
        })
        .collect();
    Ok(BenchmarkReport {
        rows,
        error_norm: "max_abs".into(),
    })
}
