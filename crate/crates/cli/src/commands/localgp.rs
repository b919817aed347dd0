use krigkit::localgp::predict_local_batch;
use krigkit::{BigDataset, Design, FitOptions};
use serde_json::{json, Value};

use super::band;
use crate::failure::Failure;
use crate::options::{Global, LocalgpArgs};
use crate::table::{num, CsvOut, Table};

pub fn localgp(g: &Global, a: &LocalgpArgs) -> Result<Value, Failure> {
    let (inputs, y) = Table::read(&a.data)?.inputs_and_response()?;
    let data = BigDataset::new(Design::from_rows(&inputs)?, y)?;
    let query = Table::read(&a.query)?.inputs();
    let opts = g.fit_options(FitOptions::local_default())?;
    let template = g.template(data.d())?;
    let preds = predict_local_batch(&data, &query, a.neighbors, &template, &opts, g.workers)?;

    let header = ["mean", "variance", "lower95", "upper95", "error"].map(String::from);
    let mut out = CsvOut::create(&a.out, &header)?;
    let mut failures = 0;
    for p in &preds {
        match p {
            Ok(p) => {
                let mut fields: Vec<String> = band(p.mean, p.variance).iter().map(|&v| num(v)).collect();
                fields.push(String::new());
                out.row(fields)?;
            }
            Err(e) => {
                failures += 1;
                out.row(["", "", "", "", &e.to_string()])?;
            }
        }
    }
    out.finish()?;
    Ok(json!({
        "training_points": data.n(),
        "indexed": data.has_index(),
        "neighbors": a.neighbors,
        "points": preds.len(),
        "failures": failures,
        "output": a.out,
    }))
}
