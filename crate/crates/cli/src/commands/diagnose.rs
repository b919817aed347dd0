use krigkit::kernels::corr_matrix;
use krigkit::linalg::{condition_from_singular_values, decomposition_benchmark, nugget_lower_bound, svd, BenchmarkReport};
use krigkit::{lhd, Design};
use serde_json::{json, Value};

use crate::failure::{Failure, InputContext};
use crate::options::{BenchmarkArgs, DiagnoseArgs, Global};
use crate::table::Table;

pub fn diagnose(g: &Global, a: &DiagnoseArgs) -> Result<Value, Failure> {
    let x = match (&a.data, a.n, a.d) {
        (Some(path), _, _) => Design::from_rows(&Table::read(path)?.inputs())?,
        (None, Some(n), Some(d)) => lhd(n, d, g.seed)?,
        _ => return Err(Failure::input("give --data or both --n and --d")),
    };
    let (n, d) = (x.n(), x.d());
    let beta = match a.beta.len() {
        1 => vec![a.beta[0]; d],
        k if k == d => a.beta.clone(),
        k => return Err(Failure::input(format!("--beta has {k} values for {d} inputs"))),
    };
    let template = g.template(d)?;
    let spec = if template.uses_beta() { template.with_beta(&beta)? } else { template };
    let r = corr_matrix(&spec, &x)?;
    // R is positive semidefinite, so its singular values are its eigenvalues
    let eigs = svd(&r)?.singular_values;
    let delta_lb = nugget_lower_bound(&eigs, g.kappa_max)?;

    let bench = match &a.out {
        Some(path) => {
            let report = decomposition_benchmark(n, d, a.trials, g.seed)?;
            std::fs::write(path, report.to_csv()).input_ctx(|| format!("cannot write {}", path.display()))?;
            Some(accuracy(&report))
        }
        None => None,
    };
    Ok(json!({
        "n": n,
        "d": d,
        "kernel": spec.family().name(),
        "beta": spec.beta(),
        "condition_number": condition_from_singular_values(&eigs),
        "eigenvalue_max": eigs.first(),
        "eigenvalue_min": eigs.last(),
        "kappa_max": g.kappa_max,
        "delta_lb": delta_lb,
        "condition_number_with_nugget": condition_from_singular_values(
            &eigs.iter().map(|e| e + delta_lb).collect::<Vec<_>>()
        ),
        "decomposition": bench,
        "decomposition_csv": a.out,
    }))
}

/// Reconstruction accuracy per method; timings stay in the CSV.
fn accuracy(report: &BenchmarkReport) -> Value {
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            json!({
                "method": r.method.name(),
                "mean_recon_err": r.mean_recon_err,
                "max_recon_err": r.max_recon_err,
                "failures": r.failures,
            })
        })
        .collect();
    json!({ "error_norm": report.error_norm, "rows": rows })
}

pub fn benchmark(g: &Global, a: &BenchmarkArgs) -> Result<Value, Failure> {
    let report = decomposition_benchmark(a.n, a.d, a.trials, g.seed)?;
    std::fs::write(&a.out, report.to_csv()).input_ctx(|| format!("cannot write {}", a.out.display()))?;
    Ok(json!({
        "n": a.n,
        "d": a.d,
        "trials": a.trials,
        "accuracy": accuracy(&report),
        "output": a.out,
    }))
}
