use krigkit::seqdesign::ei_optimize;
use krigkit::simulators::by_name;
use krigkit::{EiState, Error, FitOptions};
use serde_json::{json, Value};

use crate::failure::Failure;
use crate::options::{EiArgs, Global};
use crate::table::{num, names, CsvOut};

fn write_trace(state: &EiState, d: usize, path: &std::path::Path) -> Result<(), Failure> {
    let mut header = vec!["step".to_string()];
    header.extend(names("x", d));
    header.extend(["ei", "y", "fmin"].map(String::from));
    let mut out = CsvOut::create(path, &header)?;
    for s in &state.trace {
        let mut fields = vec![s.step.to_string()];
        fields.extend(s.point.iter().map(|&v| num(v)));
        fields.extend([s.ei, s.y, s.fmin].map(num));
        out.row(fields)?;
    }
    out.finish()
}

fn summary(state: &EiState) -> Value {
    json!({
        "status": state.status,
        "fmin": state.fmin,
        "argmin": state.argmin(),
        "evaluations": state.evaluations(),
        "n0": state.n0,
        "n_total": state.n_total,
        "initial_design": state.x[..state.n0.min(state.x.len())],
        "initial_y": state.y[..state.n0.min(state.y.len())],
    })
}

pub fn ei(g: &Global, a: &EiArgs) -> Result<Value, Failure> {
    let sim = by_name(&a.simulator)?;
    let d = sim.input_dim();
    let template = g.template(d)?;
    let opts = g.fit_options(FitOptions::default())?;
    match ei_optimize(sim.as_ref(), a.n0, a.n_total, a.candidates, &template, &opts) {
        Ok(state) => {
            write_trace(&state, d, &a.out)?;
            Ok(json!({ "simulator": sim.name(), "trace": a.out, "run": summary(&state) }))
        }
        Err(Error::SimulatorFailure { step, message, partial }) => {
            // keep what was evaluated before the failure
            write_trace(&partial, d, &a.out)?;
            Err(Failure::Compute(anyhow::anyhow!(
                "simulator failed at step {step}: {message}; partial trace written to {}",
                a.out.display()
            )))
        }
        Err(e) => Err(e.into()),
    }
}
