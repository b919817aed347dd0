use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use krigkit::{CorrelationSpec, FitOptions};
use serde::Serialize;

use crate::failure::Failure;

#[derive(Debug, Parser, Serialize)]
#[command(name = "krigkit", version, about = "Gaussian-process surrogates for computer experiments")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Fit a GP to a training CSV (inputs..., response).
    Fit(FitArgs),
    /// Predict with a saved model at query points.
    Predict(PredictArgs),
    /// Conditioning report for a design and the decomposition study.
    Diagnose(DiagnoseArgs),
    /// Compare LU, QR, Cholesky and SVD on random correlation matrices.
    Benchmark(BenchmarkArgs),
    /// Write a Latin hypercube design.
    Lhd(LhdArgs),
    /// Run a built-in simulator over a design.
    Simulate(SimulateArgs),
    /// Fit the SVD emulator to time-series responses.
    SvdgpFit(SvdgpFitArgs),
    /// Predict series with a saved SVD emulator.
    SvdgpPredict(SvdgpPredictArgs),
    /// Nearest-neighbour local GP predictions.
    Localgp(LocalgpArgs),
    /// Expected-improvement minimization of a built-in simulator.
    Ei(EiArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    Powexp,
    Matern,
    Compact,
}

/// Flags shared by all commands.
#[derive(Debug, Args, Serialize)]
pub struct Global {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, global = true, value_enum, default_value_t = Kernel::Powexp)]
    pub kernel: Kernel,
    /// Power-exponential exponent p in (0, 2].
    #[arg(long, global = true, default_value_t = 1.95)]
    pub power: f64,
    /// Matérn smoothness (0.5, 1.5 or 2.5).
    #[arg(long, global = true, default_value_t = 2.5)]
    pub nu: f64,
    /// Compact-support range, used for every coordinate.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub tau: f64,
    /// Condition-number target enforced with a nugget.
    #[arg(long, global = true, default_value_t = 1e8)]
    pub kappa_max: f64,
    /// Iterative-regularization steps used for prediction.
    #[arg(long = "M", global = true, default_value_t = 1)]
    pub m: usize,
    /// Multistart: random β candidates per input dimension.
    #[arg(long, global = true)]
    pub candidates_per_dim: Option<usize>,
    /// Multistart: best candidates kept per dimension.
    #[arg(long, global = true)]
    pub keep_per_dim: Option<usize>,
    /// Multistart: local searches (k-means centers) per dimension.
    #[arg(long, global = true)]
    pub clusters_per_dim: Option<usize>,
    /// Lower end of the log10 θ search box.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta_lo: Option<f64>,
    /// Upper end of the log10 θ search box.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta_hi: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
}

impl Global {
    pub fn template(&self, d: usize) -> Result<CorrelationSpec, Failure> {
        let spec = match self.kernel {
            Kernel::Powexp => CorrelationSpec::power_exponential(vec![0.0; d], self.power),
            Kernel::Matern => CorrelationSpec::matern(vec![0.0; d], self.nu),
            Kernel::Compact => CorrelationSpec::compact(vec![self.tau; d]),
        };
        Ok(spec?)
    }

    /// `base` with the command-line overrides applied.
    pub fn fit_options(&self, base: FitOptions) -> Result<FitOptions, Failure> {
        let mut o = base;
        o.seed = self.seed;
        o.kappa_max = self.kappa_max;
        o.m_iter = self.m;
        if let Some(v) = self.candidates_per_dim {
            o.candidates_per_dim = v;
        }
        if let Some(v) = self.keep_per_dim {
            o.keep_per_dim = v;
        }
        if let Some(v) = self.clusters_per_dim {
            o.clusters_per_dim = v;
        }
        if let Some(v) = self.beta_lo {
            o.beta_range.0 = v;
        }
        if let Some(v) = self.beta_hi {
            o.beta_range.1 = v;
        }
        o.validate()?;
        if self.m == 0 {
            return Err(Failure::input("--M must be at least 1"));
        }
        Ok(o)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mean {
    /// Known zero mean.
    Simple,
    /// Unknown constant mean.
    Ordinary,
    /// Constant plus linear terms in every input.
    Linear,
    /// Constant, linear and pure quadratic terms.
    Quadratic,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    /// Training CSV: one column per input, response last.
    #[arg(long)]
    pub data: PathBuf,
    /// Model file to write.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Mean::Ordinary)]
    pub mean: Mean,
    /// Estimate an observation-noise nugget.
    #[arg(long)]
    pub noisy: bool,
    /// Map inputs to the unit cube using the column ranges.
    #[arg(long)]
    pub scale: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Query CSV; a trailing column named `y` is ignored.
    #[arg(long)]
    pub query: PathBuf,
    /// Prediction CSV to write (mean,variance,lower95,upper95).
    #[arg(long)]
    pub out: PathBuf,
    /// Also write an (x, truth, mean, lower, upper) grid for 1-d models.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    /// Simulator giving the truth column of the plot grid.
    #[arg(long)]
    pub truth: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct DiagnoseArgs {
    /// Design or training CSV; a trailing column named `y` is ignored.
    #[arg(long, conflicts_with_all = ["n", "d"])]
    pub data: Option<PathBuf>,
    /// Synthetic LHD size, used without --data.
    #[arg(long, requires = "d")]
    pub n: Option<usize>,
    #[arg(long, requires = "n")]
    pub d: Option<usize>,
    /// log10 θ, one value for all inputs or one per input (comma separated).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0")]
    pub beta: Vec<f64>,
    /// Decomposition-study trials.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Decomposition-study CSV to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchmarkArgs {
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct LhdArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    /// Maximin improvement passes.
    #[arg(long, default_value_t = 0)]
    pub maximin: usize,
    /// Per-input ranges `lo:hi`, comma separated; unit cube when absent.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub bounds: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// onedim, hartman6 or dynamic_toy.
    #[arg(long)]
    pub simulator: String,
    /// Design CSV on the unit cube.
    #[arg(long)]
    pub design: PathBuf,
    /// Series length for dynamic_toy.
    #[arg(long, default_value_t = 50)]
    pub length: usize,
    /// Standard deviation of added Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    pub noise_sd: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SvdgpFitArgs {
    #[arg(long)]
    pub design: PathBuf,
    /// One row per run, one column per time step.
    #[arg(long)]
    pub responses: PathBuf,
    /// Fraction of Σd² kept; 1 keeps the numerical rank.
    #[arg(long, default_value_t = 0.95)]
    pub frac: f64,
    /// Subtract the mean series before decomposing.
    #[arg(long)]
    pub center: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SvdgpPredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub query: PathBuf,
    /// Long-format CSV (point,t,mean,variance,lower95,upper95).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct LocalgpArgs {
    /// Training CSV: inputs on the unit cube, response last.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub query: PathBuf,
    /// Neighbourhood size.
    #[arg(long, default_value_t = 50)]
    pub neighbors: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct EiArgs {
    /// onedim or hartman6.
    #[arg(long)]
    pub simulator: String,
    #[arg(long)]
    pub n0: usize,
    #[arg(long)]
    pub n_total: usize,
    /// Fresh LHD candidates per step.
    #[arg(long, default_value_t = 500)]
    pub candidates: usize,
    /// Trace CSV (step,x1..xd,ei,y,fmin).
    #[arg(long)]
    pub out: PathBuf,
}
