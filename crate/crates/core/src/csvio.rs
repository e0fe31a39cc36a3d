//! CSV ingestion of datasets and plain CSV output helpers.
//!
//! Input: comma-separated, header row, UTF-8, `.` decimals, no missing values.

use std::io::{Read, Write};
use std::path::Path;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// How to read a dataset from CSV.
#[derive(Debug, Clone, Default)]
pub struct CsvSpec {
    /// Response column name.
    pub response: String,
    /// Predictor columns; all other columns when `None`.
    pub columns: Option<Vec<String>>,
    /// Response value mapped to 1 (everything else to 0). Without it the
    /// response must be numeric 0 or 1.
    pub positive: Option<String>,
}

impl CsvSpec {
    pub fn new(response: impl Into<String>) -> Self {
        Self {
            response: response.into(),
            ..Self::default()
        }
    }
}

pub fn read_dataset_path(path: &Path, spec: &CsvSpec) -> Result<Dataset> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Argument(format!("cannot open {}: {e}", path.display())))?;
    read_dataset(file, spec)
}

pub fn read_dataset<R: Read>(reader: R, spec: &CsvSpec) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Argument(format!("unknown column '{name}'")))
    };
    let y_col = find(&spec.response)?;
    let x_cols: Vec<usize> = match &spec.columns {
        Some(cols) => cols.iter().map(|c| find(c)).collect::<Result<_>>()?,
        None => (0..headers.len()).filter(|&j| j != y_col).collect(),
    };
    if x_cols.contains(&y_col) {
        return Err(Error::Argument(
            "response column also listed as a predictor".into(),
        ));
    }
    let names: Vec<String> = x_cols.iter().map(|&j| headers[j].clone()).collect();

    let mut predictors = Vec::new();
    let mut response = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let line = i + 2;
        let field = |j: usize| -> Result<&str> {
            let v = record.get(j).map(str::trim).unwrap_or("");
            if v.is_empty() {
                Err(Error::Argument(format!(
                    "missing value in column '{}' at line {line}",
                    headers[j]
                )))
            } else {
                Ok(v)
            }
        };
        for &j in &x_cols {
            let raw = field(j)?;
            let v: f64 = raw.parse().map_err(|_| {
                Error::Argument(format!(
                    "non-numeric '{raw}' in column '{}' at line {line}",
                    headers[j]
                ))
            })?;
            predictors.push(v);
        }
        let raw = field(y_col)?;
        let y = match &spec.positive {
            Some(label) => u8::from(raw == label),
            None => match raw.parse::<f64>() {
                Ok(0.0) => 0,
                Ok(1.0) => 1,
                _ => {
                    return Err(Error::Argument(format!(
                        "response '{raw}' at line {line} is not 0 or 1 (use a positive label for categorical responses)"
                    )))
                }
            },
        };
        response.push(y);
    }
    Dataset::new(names.len(), predictors, response, names)
}

/// Writes predictors followed by the response column `y`.
pub fn write_dataset<W: Write>(writer: W, data: &Dataset) -> Result<()> {
    let mut header: Vec<String> = data.names().to_vec();
    header.push("y".into());
    let rows = data.rows().zip(data.response()).map(|(x, &y)| {
        x.iter()
            .map(|v| fmt_full(*v))
            .chain(std::iter::once(y.to_string()))
            .collect()
    });
    write_table(writer, &header, rows)
}

/// Shortest round-trip decimal representation.
/// Shortest round-trip representation; scientific outside [1e-5, 1e15).
pub fn fmt_full(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-5..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_string(), fmt_full)
}

pub fn write_table<W, I>(writer: W, header: &[String], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const CSV: &str = "a,b,label\n1.5,2,Yes\n-3,4e-1,No\n0,1,Yes\n";

    #[test]
    fn reads_with_positive_label() {
        let spec = CsvSpec {
            positive: Some("Yes".into()),
            ..CsvSpec::new("label")
        };
        let d = read_dataset(CSV.as_bytes(), &spec).unwrap();
        assert_eq!(d.names(), &["a", "b"]);
        assert_eq!(d.response(), &[1, 0, 1]);
        assert_eq!(d.row(1), &[-3.0, 0.4]);
    }

    #[test]
    fn selects_columns() {
        let spec = CsvSpec {
            columns: Some(vec!["b".into()]),
            positive: Some("No".into()),
            ..CsvSpec::new("label")
        };
        let d = read_dataset(CSV.as_bytes(), &spec).unwrap();
        assert_eq!(d.p(), 1);
        assert_eq!(d.response(), &[0, 1, 0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_dataset(CSV.as_bytes(), &CsvSpec::new("label")).is_err());
        assert!(read_dataset(CSV.as_bytes(), &CsvSpec::new("nope")).is_err());
        let missing = "x,y\n1,\n";
        assert!(read_dataset(missing.as_bytes(), &CsvSpec::new("y")).is_err());
        let text = "x,y\nabc,1\n";
        assert!(read_dataset(text.as_bytes(), &CsvSpec::new("y")).is_err());
        let two = "x,y\n1,2\n";
        assert!(read_dataset(two.as_bytes(), &CsvSpec::new("y")).is_err());
    }

    #[test]
    fn write_then_read() {
        let d = Dataset::from_rows(&[vec![0.1, -2.0], vec![1e-17, 3.25]], vec![1, 0]).unwrap();
        let mut buf = Vec::new();
        write_dataset(&mut buf, &d).unwrap();
        let back = read_dataset(buf.as_slice(), &CsvSpec::new("y")).unwrap();
        assert_eq!(back, d);
    }
}
