//! Expected-improvement sequential design for global minimization.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use libm::erfc;

use crate::design::{lhd, Design};
use crate::error::{Error, Result};
use crate::gpmodel::{fit, FitOptions, GpModel};
use crate::kernels::CorrelationSpec;
use crate::rng::derive_seed;
use crate::simulators::Simulator;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

fn norm_cdf(u: f64) -> f64 {
    0.5 * erfc(-u / std::f64::consts::SQRT_2)
}

fn norm_pdf(u: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * u * u).exp()
}

/// `E[max(f_min − Y, 0)]` for `Y ~ N(mean, sd²)`:
/// `(f_min − mean)Φ(u) + sd·φ(u)` with `u = (f_min − mean)/sd`.
pub fn expected_improvement(mean: f64, sd: f64, fmin: f64) -> f64 {
    let gap = fmin - mean;
    if !(sd > 0.0) {
        return gap.max(0.0);
    }
    let u = gap / sd;
    (gap * norm_cdf(u) + sd * norm_pdf(u)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EiStatus {
    /// The evaluation budget was spent.
    Completed,
    /// Every candidate had zero expected improvement.
    Stalled,
    /// A simulator call failed; the state holds everything evaluated before it.
    Aborted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EiStep {
    pub step: usize,
    pub point: Vec<f64>,
    pub ei: f64,
    pub y: f64,
    pub fmin: f64,
}

/// Ledger of a sequential-design run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EiState {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub fmin: f64,
    pub trace: Vec<EiStep>,
    pub n0: usize,
    pub n_total: usize,
    pub status: EiStatus,
}

impl EiState {
    /// State after evaluating an initial design.
    pub fn new(x: Vec<Vec<f64>>, y: Vec<f64>, n_total: usize) -> Self {
        let fmin = y.iter().copied().fold(f64::INFINITY, f64::min);
        EiState {
            n0: y.len(),
            x,
            y,
            fmin,
            trace: Vec::new(),
            n_total,
            status: EiStatus::Completed,
        }
    }

    pub fn evaluations(&self) -> usize {
        self.y.len()
    }

    pub fn argmin(&self) -> Option<&[f64]> {
        let (i, _) = self
            .y
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))?;
        Some(&self.x[i])
    }

    fn record(&mut self, point: Vec<f64>, ei: f64, y: f64) {
        self.fmin = self.fmin.min(y);
        self.trace.push(EiStep {
            step: self.trace.len() + 1,
            point: point.clone(),
            ei,
            y,
            fmin: self.fmin,
        });
        self.x.push(point);
        self.y.push(y);
    }
}

/// Result of one acquisition step.
#[derive(Debug, Clone, PartialEq)]
pub struct EiChoice {
    pub index: usize,
    pub point: Vec<f64>,
    pub ei: f64,
    /// All candidates had zero expected improvement.
    pub stalled: bool,
}

/// Picks the candidate with the largest EI under `model`; ties go to the
/// lowest index. Candidates coinciding with an evaluated point score zero.
pub fn ei_step(fmin: f64, model: &GpModel, candidates: &Design) -> Result<EiChoice> {
    if candidates.n() == 0 {
        return Err(Error::EmptyCandidates);
    }
    let seen = model.x();
    let scores: Vec<f64> = (0..candidates.n())
        .into_par_iter()
        .map(|i| {
            let c = candidates.row(i);
            if seen.rows().any(|r| r == c) {
                return Ok(0.0);
            }
            let p = model.predict(c, 1)?;
            Ok(expected_improvement(p.mean, p.sd(), fmin))
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s > scores[best] {
            best = i;
        }
    }
    Ok(EiChoice {
        index: best,
        point: candidates.row(best).to_vec(),
        ei: scores[best],
        stalled: scores[best] <= 0.0,
    })
}

/// Sequential minimization: `n0`-point LHD, then one EI-chosen point per
/// step from a fresh `candidate_count`-point LHD, refitting from scratch each
/// time, until `n_total` evaluations or a stall.
pub fn ei_optimize(
    sim: &dyn Simulator,
    n0: usize,
    n_total: usize,
    candidate_count: usize,
    template: &CorrelationSpec,
    opts: &FitOptions,
) -> Result<EiState> {
    if n0 < 2 || n_total < n0 {
        return Err(Error::InvalidSize(format!("need 2 <= n0 <= n_total, got n0={n0}, n_total={n_total}")));
    }
    if candidate_count == 0 {
        return Err(Error::EmptyCandidates);
    }
    let d = sim.input_dim();
    if template.d() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: template.d(),
        });
    }
    let seed = opts.seed;
    let init = lhd(n0, d, derive_seed(seed, 0))?;
    let mut state = EiState::new(Vec::new(), Vec::new(), n_total);
    state.n0 = n0;
    for row in init.rows() {
        match sim.evaluate(row) {
            Ok(y) => {
                state.x.push(row.to_vec());
                state.y.push(y);
            }
            Err(e) => return Err(abort(state, 0, e)),
        }
    }
    state.fmin = state.y.iter().copied().fold(f64::INFINITY, f64::min);

    while state.evaluations() < n_total {
        let k = state.trace.len() as u64 + 1;
        let x = Design::from_rows(&state.x)?;
        let model = fit(&x, &state.y, template, &opts.clone().with_seed(derive_seed(seed, 2 * k - 1)))?;
        let candidates = lhd(candidate_count, d, derive_seed(seed, 2 * k))?;
        let choice = ei_step(state.fmin, &model, &candidates)?;
        if choice.stalled {
            state.status = EiStatus::Stalled;
            break;
        }
        match sim.evaluate(&choice.point) {
            Ok(y) => state.record(choice.point, choice.ei, y),
            Err(e) => return Err(abort(state, k as usize, e)),
        }
    }
    Ok(state)
}

fn abort(mut state: EiState, step: usize, e: Error) -> Error {
    state.status = EiStatus::Aborted;
    Error::SimulatorFailure {
        step,
        message: e.to_string(),
        partial: Box::new(state),
    }
}
