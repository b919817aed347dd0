//! Gaussian-process surrogates for deterministic and noisy computer
//! experiments.
//!
//! * [`linalg`] — Cholesky/SVD services, condition numbers, nugget bounds and
//!   a decomposition-accuracy benchmark.
//! * [`kernels`] — power-exponential, Matérn and compactly supported
//!   correlation functions.
//! * [`design`] — Latin hypercube designs and input scaling.
//! * [`gpmodel`] — simple/ordinary/universal kriging, noisy fits, iterative
//!   regularization and model files.
//! * [`svdgp`] — SVD-based emulation of time-series outputs.
//! * [`localgp`] — nearest-neighbour local GPs for large data.
//! * [`seqdesign`] — expected-improvement minimization.
//! * [`simulators`] — test functions.
//!
//! Every stochastic routine takes an explicit `u64` seed and is
//! bit-reproducible, independent of thread count.

// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod design;
pub mod error;
pub mod gpmodel;
pub mod kernels;
pub mod linalg;
pub mod localgp;
pub mod rng;
pub mod seqdesign;
pub mod simulators;
pub mod svdgp;

pub use design::{lhd, Bounds, Design};
pub use error::{Error, Result};
pub use gpmodel::{
    fit, fit_noisy, fit_simple, fit_universal, load_model, save_model, BasisFunction, FitOptions, GpModel, MeanMode,
    PredictionResult,
};
pub use kernels::{CorrelationSpec, KernelFamily, MaternNu};
pub use linalg::{CholFactor, SpectralDecomp, SymMatrix};
pub use localgp::BigDataset;
pub use seqdesign::{EiState, EiStatus};
pub use svdgp::{ResponseMatrix, SvdGpModel};

pub use nalgebra::{DMatrix, DVector};
