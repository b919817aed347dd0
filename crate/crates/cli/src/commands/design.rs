use krigkit::design::{maximin_improve, unscale};
use krigkit::simulators::{by_name, dynamic_toy};
use krigkit::{Bounds, Design};
use rand_distr::{Distribution, Normal};
use serde_json::{json, Value};

use crate::failure::Failure;
use crate::options::{Global, LhdArgs, SimulateArgs};
use crate::table::{names, CsvOut, Table};

fn parse_bounds(spec: &[String], d: usize) -> Result<Option<Bounds>, Failure> {
    if spec.is_empty() {
        return Ok(None);
    }
    if spec.len() != d {
        return Err(Failure::input(format!("--bounds has {} ranges for {d} inputs", spec.len())));
    }
    let ranges = spec
        .iter()
        .map(|s| {
            let (lo, hi) = s
                .split_once(':')
                .ok_or_else(|| Failure::input(format!("range '{s}' is not of the form lo:hi")))?;
            let parse = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Failure::input(format!("range '{s}' is not numeric")))
            };
            Ok((parse(lo)?, parse(hi)?))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(Some(Bounds::new(ranges)?))
}

pub fn lhd(g: &Global, a: &LhdArgs) -> Result<Value, Failure> {
    let mut x = krigkit::lhd(a.n, a.d, g.seed)?;
    if a.maximin > 0 {
        x = maximin_improve(&x, a.maximin, g.seed.wrapping_add(1));
    }
    let bounds = parse_bounds(&a.bounds, a.d)?;
    let rows = match &bounds {
        Some(b) => unscale(&x, b),
        None => x.to_rows(),
    };
    let mut out = CsvOut::create(&a.out, &names("x", a.d))?;
    for r in &rows {
        out.numbers(r)?;
    }
    out.finish()?;
    Ok(json!({
        "n": a.n,
        "d": a.d,
        "maximin_passes": a.maximin,
        "min_distance": x.min_distance(),
        "output": a.out,
    }))
}

pub fn simulate(g: &Global, a: &SimulateArgs) -> Result<Value, Failure> {
    let x = Design::from_rows(&Table::read(&a.design)?.inputs())?;
    if !(a.noise_sd >= 0.0 && a.noise_sd.is_finite()) {
        return Err(Failure::input("--noise-sd must be a nonnegative number"));
    }
    let normal = Normal::new(0.0, a.noise_sd).map_err(|e| Failure::input(e.to_string()))?;
    let mut rng = krigkit::rng::rng_from_seed(g.seed);
    let mut noise = || if a.noise_sd > 0.0 { normal.sample(&mut rng) } else { 0.0 };

    if a.simulator == "dynamic_toy" {
        let mut out = CsvOut::create(&a.out, &names("t", a.length))?;
        for r in x.rows() {
            let series: Vec<f64> = dynamic_toy(r, a.length)?.into_iter().map(|v| v + noise()).collect();
            out.numbers(&series)?;
        }
        out.finish()?;
        return Ok(json!({
            "simulator": a.simulator,
            "runs": x.n(),
            "length": a.length,
            "noise_sd": a.noise_sd,
            "output": a.out,
        }));
    }

    let sim = by_name(&a.simulator)?;
    if sim.input_dim() != x.d() {
        return Err(Failure::input(format!(
            "{} takes {} inputs but the design has {}",
            sim.name(),
            sim.input_dim(),
            x.d()
        )));
    }
    let mut header = names("x", x.d());
    header.push("y".into());
    let mut out = CsvOut::create(&a.out, &header)?;
    let mut ys = Vec::with_capacity(x.n());
    for r in x.rows() {
        let y = sim.evaluate(r)? + noise();
        let mut row = r.to_vec();
        row.push(y);
        out.numbers(&row)?;
        ys.push(y);
    }
    out.finish()?;
    Ok(json!({
        "simulator": sim.name(),
        "runs": x.n(),
        "noise_sd": a.noise_sd,
        "y_min": ys.iter().copied().fold(f64::INFINITY, f64::min),
        "y_max": ys.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        "output": a.out,
    }))
}
