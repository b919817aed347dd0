use std::sync::atomic::{AtomicUsize, Ordering};

use krigkit::seqdesign::{ei_optimize, ei_step, expected_improvement};
use krigkit::simulators::{OneDimTest, Simulator};
use krigkit::{fit, CorrelationSpec, Design, EiStatus, Error, FitOptions};
use proptest::prelude::*;

fn quick(seed: u64) -> FitOptions {
    FitOptions {
        candidates_per_dim: 40,
        keep_per_dim: 15,
        clusters_per_dim: 1,
        seed,
        ..FitOptions::default()
    }
}

fn onedim_model() -> krigkit::GpModel {
    let x = Design::from_rows(&[vec![0.05], vec![0.3], vec![0.55], vec![0.8], vec![0.95]]).unwrap();
    let y: Vec<f64> = x.rows().map(|r| OneDimTest.evaluate(r).unwrap()).collect();
    let spec = CorrelationSpec::power_exponential(vec![0.0], 1.95).unwrap();
    fit(&x, &y, &spec, &quick(1)).unwrap()
}

#[test]
fn two_candidates_by_hand() {
    let model = onedim_model();
    let fmin = model.y().iter().copied().fold(f64::INFINITY, f64::min);
    let cands = Design::from_rows(&[vec![0.42], vec![0.67]]).unwrap();
    let ei: Vec<f64> = cands
        .rows()
        .map(|c| {
            let p = model.predict(c, 1).unwrap();
            expected_improvement(p.mean, p.sd(), fmin)
        })
        .collect();
    let want = if ei[1] > ei[0] { 1 } else { 0 };
    let choice = ei_step(fmin, &model, &cands).unwrap();
    assert_eq!(choice.index, want);
    assert_eq!(choice.ei, ei[want]);
    assert!(!choice.stalled);
}

#[test]
fn single_candidate_is_chosen() {
    let model = onedim_model();
    let cands = Design::from_rows(&[vec![0.12]]).unwrap();
    let choice = ei_step(-10.0, &model, &cands).unwrap();
    assert_eq!(choice.index, 0);
    assert_eq!(choice.point, vec![0.12]);
}

#[test]
fn training_points_only_stalls() {
    let model = onedim_model();
    let fmin = model.y().iter().copied().fold(f64::INFINITY, f64::min);
    let choice = ei_step(fmin, &model, model.x()).unwrap();
    assert!(choice.stalled);
    assert_eq!(choice.ei, 0.0);
    assert_eq!(choice.index, 0);
}

#[test]
fn empty_candidates_rejected() {
    let spec = CorrelationSpec::power_exponential(vec![0.0], 1.95).unwrap();
    assert!(matches!(
        ei_optimize(&OneDimTest, 4, 8, 0, &spec, &quick(0)),
        Err(Error::EmptyCandidates)
    ));
}

#[test]
fn no_budget_means_empty_trace() {
    let spec = CorrelationSpec::power_exponential(vec![0.0], 1.95).unwrap();
    let state = ei_optimize(&OneDimTest, 6, 6, 100, &spec, &quick(4)).unwrap();
    assert!(state.trace.is_empty());
    assert_eq!(state.status, EiStatus::Completed);
    assert_eq!(state.fmin, state.y.iter().copied().fold(f64::INFINITY, f64::min));
}

#[test]
fn running_minimum_is_monotone_and_deterministic() {
    let spec = CorrelationSpec::power_exponential(vec![0.0], 1.95).unwrap();
    let a = ei_optimize(&OneDimTest, 5, 12, 200, &spec, &quick(8)).unwrap();
    let b = ei_optimize(&OneDimTest, 5, 12, 200, &spec, &quick(8)).unwrap();
    assert_eq!(a, b);
    for w in a.trace.windows(2) {
        assert!(w[1].fmin <= w[0].fmin);
    }
    assert!(a.evaluations() == 12 || a.status == EiStatus::Stalled);
}

struct Flaky {
    calls: AtomicUsize,
    fail_at: usize,
}

impl Simulator for Flaky {
    fn name(&self) -> &str {
        "flaky"
    }
    fn input_dim(&self) -> usize {
        1
    }
    fn evaluate(&self, x: &[f64]) -> krigkit::Result<f64> {
        if self.calls.fetch_add(1, Ordering::SeqCst) + 1 == self.fail_at {
            return Err(Error::Domain("solver diverged".into()));
        }
        OneDimTest.evaluate(x)
    }
}

#[test]
fn simulator_failure_keeps_partial_state() {
    let sim = Flaky {
        calls: AtomicUsize::new(0),
        fail_at: 8,
    };
    let spec = CorrelationSpec::power_exponential(vec![0.0], 1.95).unwrap();
    match ei_optimize(&sim, 5, 15, 100, &spec, &quick(2)) {
        Err(Error::SimulatorFailure { step, partial, .. }) => {
            assert_eq!(step, 3);
            assert_eq!(partial.status, EiStatus::Aborted);
            assert_eq!(partial.evaluations(), 7);
            assert_eq!(partial.trace.len(), 2);
        }
        other => panic!("expected SimulatorFailure, got {other:?}"),
    }
}

proptest! {
    #[test]
    fn ei_is_affine_covariant(mean in -5.0f64..5.0, sd in 0.01f64..3.0, fmin in -5.0f64..5.0,
                             shift in -10.0f64..10.0, c in 0.1f64..10.0) {
        let base = expected_improvement(mean, sd, fmin);
        let shifted = expected_improvement(mean + shift, sd, fmin + shift);
        prop_assert!((base - shifted).abs() <= 1e-12 * (1.0 + base) + 1e-12 * shift.abs());
        let scaled = expected_improvement(c * mean, c * sd, c * fmin);
        prop_assert!((scaled - c * base).abs() <= 1e-10 * (1.0 + c * base));
    }

    #[test]
    fn ei_is_nonnegative_and_bounded_below_by_gap(mean in -5.0f64..5.0, sd in 0.0f64..3.0, fmin in -5.0f64..5.0) {
        let ei = expected_improvement(mean, sd, fmin);
        prop_assert!(ei >= 0.0);
        prop_assert!(ei >= (fmin - mean) - 1e-12);
    }
}
