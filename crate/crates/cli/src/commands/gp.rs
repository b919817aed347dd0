use krigkit::gpmodel::{fit_universal, load_model, save_model};
use krigkit::{fit_noisy, fit_simple, BasisFunction, Bounds, FitOptions, GpModel};
use serde_json::{json, Value};

use super::{band, to_unit};
use crate::failure::Failure;
use crate::options::{FitArgs, Global, Mean, PredictArgs};
use crate::table::{num, CsvOut, Table};

fn column_bounds(rows: &[Vec<f64>]) -> Result<Bounds, Failure> {
    let d = rows[0].len();
    let ranges = (0..d)
        .map(|k| {
            rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r[k]), hi.max(r[k]))
            })
        })
        .collect();
    Ok(Bounds::new(ranges)?)
}

pub(crate) fn summary(model: &GpModel) -> Value {
    json!({
        "n": model.n(),
        "d": model.d(),
        "kernel": model.spec().family().name(),
        "beta": model.beta(),
        "theta": model.spec().theta(),
        "mean_mode": model.mean_mode(),
        "gamma_hat": model.gamma_hat(),
        "mu_hat": model.mu_hat(),
        "sigma2_hat": model.sigma2_hat(),
        "delta": model.delta(),
        "noise_variance": model.noise_variance(),
        "deviance": model.parts().deviance,
        "condition_number": model.condition_number().ok(),
        "kappa_max": model.parts().kappa_max,
        "degenerate": model.is_degenerate(),
        "noisy": model.is_noisy(),
    })
}

pub fn fit(g: &Global, a: &FitArgs) -> Result<Value, Failure> {
    let table = Table::read(&a.data)?;
    let (inputs, y) = table.inputs_and_response()?;
    let bounds = if a.scale { Some(column_bounds(&inputs)?) } else { None };
    let x = to_unit(&inputs, bounds.as_ref())?;
    let template = g.template(x.d())?;
    let opts = g.fit_options(FitOptions::default())?;
    if a.noisy && a.mean != Mean::Ordinary {
        return Err(Failure::input("--noisy supports only the ordinary mean"));
    }
    let mut model = if a.noisy {
        fit_noisy(&x, &y, &template, &opts)?
    } else {
        match a.mean {
            Mean::Simple => fit_simple(&x, &y, &template, &opts)?,
            Mean::Ordinary => krigkit::fit(&x, &y, &template, &opts)?,
            Mean::Linear | Mean::Quadratic => {
                let mut basis = vec![BasisFunction::Constant];
                basis.extend((0..x.d()).map(BasisFunction::Linear));
                if a.mean == Mean::Quadratic {
                    basis.extend((0..x.d()).map(BasisFunction::Quadratic));
                }
                fit_universal(&x, &y, &basis, &template, &opts)?
            }
        }
    };
    model.set_bounds(bounds);
    save_model(&model, &a.out)?;
    Ok(json!({ "model": a.out, "fit": summary(&model) }))
}

pub fn predict(g: &Global, a: &PredictArgs) -> Result<Value, Failure> {
    let model = load_model(&a.model)?;
    let query = Table::read(&a.query)?.inputs();
    let x = to_unit(&query, model.bounds())?;
    let preds = model.predict_batch(x.rows(), g.m)?;
    let header = ["mean", "variance", "lower95", "upper95"].map(String::from);
    let mut out = CsvOut::create(&a.out, &header)?;
    for p in &preds {
        out.numbers(&band(p.mean, p.variance))?;
    }
    out.finish()?;
    if let Some(path) = &a.plot_data {
        plot_grid(&model, g.m, a, path)?;
    }
    Ok(json!({
        "points": preds.len(),
        "M": g.m,
        "clamped_variances": preds.iter().filter(|p| p.clamped).count(),
        "output": a.out,
        "plot_data": a.plot_data,
    }))
}

fn plot_grid(model: &GpModel, m: usize, a: &PredictArgs, path: &std::path::Path) -> Result<(), Failure> {
    if model.d() != 1 {
        return Err(Failure::input("--plot-data needs a model with one input"));
    }
    if a.grid < 2 {
        return Err(Failure::input("--grid must be at least 2"));
    }
    let truth = a.truth.as_deref().map(krigkit::simulators::by_name).transpose()?;
    let (lo, hi) = model.bounds().map_or((0.0, 1.0), |b| b.as_slice()[0]);
    let header = ["x", "truth", "mean", "lower", "upper"].map(String::from);
    let mut out = CsvOut::create(path, &header)?;
    for i in 0..a.grid {
        let x = lo + (hi - lo) * i as f64 / (a.grid - 1) as f64;
        let unit = (x - lo) / (hi - lo);
        let p = model.predict(&[unit], m)?;
        let [mean, _, lower, upper] = band(p.mean, p.variance);
        let t = match &truth {
            Some(sim) => num(sim.evaluate(&[x])?),
            None => String::new(),
        };
        out.row([num(x), t, num(mean), num(lower), num(upper)])?;
    }
    out.finish()
}
