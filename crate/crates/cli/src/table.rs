//! Numeric CSV input and output.

use std::path::Path;

use crate::failure::{Failure, InputContext};

/// A CSV of finite numbers with a header row.
#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self, Failure> {
        let shown = path.display().to_string();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .input_ctx(|| format!("cannot open {shown}"))?;
        let header: Vec<String> = reader
            .headers()
            .input_ctx(|| format!("{shown}: bad header"))?
            .iter()
            .map(str::to_owned)
            .collect();
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let line = i + 2;
            let record = record.input_ctx(|| format!("{shown}:{line}: malformed row"))?;
            let row = record
                .iter()
                .map(|f| match f.parse::<f64>() {
                    Ok(v) if v.is_finite() => Ok(v),
                    _ => Err(Failure::input(format!("{shown}:{line}: '{f}' is not a finite number"))),
                })
                .collect::<Result<Vec<f64>, Failure>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Failure::input(format!("{shown}: no data rows")));
        }
        Ok(Table { header, rows })
    }

    pub fn cols(&self) -> usize {
        self.header.len()
    }

    /// Splits off the last column as the response.
    pub fn inputs_and_response(&self) -> Result<(Vec<Vec<f64>>, Vec<f64>), Failure> {
        if self.cols() < 2 {
            return Err(Failure::input("training data needs at least one input column and a response column"));
        }
        let d = self.cols() - 1;
        Ok((
            self.rows.iter().map(|r| r[..d].to_vec()).collect(),
            self.rows.iter().map(|r| r[d]).collect(),
        ))
    }

    /// Input columns: everything except a trailing column named `y`.
    pub fn inputs(&self) -> Vec<Vec<f64>> {
        let d = if self.header.last().is_some_and(|h| h == "y") && self.cols() > 1 {
            self.cols() - 1
        } else {
            self.cols()
        };
        self.rows.iter().map(|r| r[..d].to_vec()).collect()
    }
}

/// Shortest round-trip text for `v`, in exponent form when very large or small.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Buffered CSV writer.
pub struct CsvOut {
    writer: csv::Writer<std::fs::File>,
    path: String,
}

impl CsvOut {
    pub fn create(path: &Path, header: &[String]) -> Result<Self, Failure> {
        let shown = path.display().to_string();
        let mut writer = csv::Writer::from_path(path).input_ctx(|| format!("cannot create {shown}"))?;
        writer.write_record(header).input_ctx(|| format!("cannot write {shown}"))?;
        Ok(CsvOut { writer, path: shown })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), Failure>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let path = &self.path;
        self.writer.write_record(fields).input_ctx(|| format!("cannot write {path}"))
    }

    pub fn numbers(&mut self, values: &[f64]) -> Result<(), Failure> {
        self.row(values.iter().map(|&v| num(v)))
    }

    pub fn finish(mut self) -> Result<(), Failure> {
        let path = self.path;
        self.writer.flush().input_ctx(|| format!("cannot write {path}"))
    }
}

pub fn names(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}{i}")).collect()
}
