use krigkit::svdgp::{fit_svdgp, predict_svdgp, SvdGpModel, SvdGpOptions, SvdGpParts};
use krigkit::{Design, Error, FitOptions, ResponseMatrix};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::band;
use crate::failure::{Failure, InputContext};
use crate::options::{Global, SvdgpFitArgs, SvdgpPredictArgs};
use crate::table::{num, CsvOut, Table};

const KIND: &str = "svdgp";

#[derive(Serialize, Deserialize)]
struct SvdGpFile {
    schema_version: u64,
    kind: String,
    #[serde(flatten)]
    parts: SvdGpParts,
}

pub fn fit(g: &Global, a: &SvdgpFitArgs) -> Result<Value, Failure> {
    let x = Design::from_rows(&Table::read(&a.design)?.inputs())?;
    let runs = Table::read(&a.responses)?.rows;
    let y = ResponseMatrix::from_columns(&runs)?;
    let opts = SvdGpOptions {
        frac: a.frac,
        center: a.center,
        fit: g.fit_options(FitOptions::default())?,
    };
    let model = fit_svdgp(&x, &y, &g.template(x.d())?, &opts)?;
    let file = SvdGpFile {
        schema_version: krigkit::gpmodel::SCHEMA_VERSION,
        kind: KIND.into(),
        parts: model.to_parts(),
    };
    let text = serde_json::to_string_pretty(&file).map_err(|e| Failure::Compute(e.into()))?;
    std::fs::write(&a.out, text).input_ctx(|| format!("cannot write {}", a.out.display()))?;
    let coefficient_fits: Vec<Value> = model.coefficient_models().iter().map(super::gp::summary).collect();
    Ok(json!({
        "p": model.p(),
        "runs": y.runs(),
        "length": y.len(),
        "singular_values": model.singular_values(),
        "residual_var": model.residual_var(),
        "coefficients": coefficient_fits,
        "model": a.out,
    }))
}

fn load(path: &std::path::Path) -> Result<SvdGpModel, Failure> {
    let text = std::fs::read_to_string(path).input_ctx(|| format!("cannot read {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::CorruptFile(e.to_string()))?;
    let found = value.get("schema_version").and_then(Value::as_u64);
    if found != Some(krigkit::gpmodel::SCHEMA_VERSION) {
        return Err(Error::SchemaVersionMismatch {
            found: found.unwrap_or(0),
            expected: krigkit::gpmodel::SCHEMA_VERSION,
        }
        .into());
    }
    let file: SvdGpFile = serde_json::from_value(value).map_err(|e| Error::CorruptFile(e.to_string()))?;
    if file.kind != KIND {
        return Err(Error::CorruptFile(format!("expected an {KIND} model, found '{}'", file.kind)).into());
    }
    Ok(SvdGpModel::from_parts(file.parts)?)
}

pub fn predict(g: &Global, a: &SvdgpPredictArgs) -> Result<Value, Failure> {
    let model = load(&a.model)?;
    let query = Design::from_rows(&Table::read(&a.query)?.inputs())?;
    let header = ["point", "t", "mean", "variance", "lower95", "upper95"].map(String::from);
    let mut out = CsvOut::create(&a.out, &header)?;
    for (i, x0) in query.rows().enumerate() {
        let (mean, var) = predict_svdgp(&model, x0, g.m)?;
        for (t, (m, v)) in mean.iter().zip(&var).enumerate() {
            let [m, v, lo, hi] = band(*m, *v);
            out.row([
                (i + 1).to_string(),
                (t + 1).to_string(),
                num(m),
                num(v),
                num(lo),
                num(hi),
            ])?;
        }
    }
    out.finish()?;
    Ok(json!({
        "points": query.n(),
        "length": model.series_len(),
        "p": model.p(),
        "M": g.m,
        "output": a.out,
    }))
}
