//! Binary-response datasets.

use crate::error::{Error, Result};

/// An `n x p` predictor matrix (row-major) with a 0/1 response.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    n: usize,
    p: usize,
    predictors: Vec<f64>,
    response: Vec<u8>,
    names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset from a row-major predictor buffer.
    pub fn new(
        p: usize,
        predictors: Vec<f64>,
        response: Vec<u8>,
        names: Vec<String>,
    ) -> Result<Self> {
        let n = response.len();
        if n == 0 {
            return Err(Error::Argument(
                "dataset needs at least one observation".into(),
            ));
        }
        if predictors.len() != n * p {
            return Err(Error::Argument(format!(
                "predictor buffer has {} values, expected {n} x {p}",
                predictors.len()
            )));
        }
        if names.len() != p {
            return Err(Error::Argument(format!(
                "{} names for {p} predictors",
                names.len()
            )));
        }
        if let Some(pos) = predictors.iter().position(|v| !v.is_finite()) {
            return Err(Error::Argument(format!(
                "non-finite predictor at row {}, column {}",
                pos / p.max(1),
                pos % p.max(1)
            )));
        }
        if let Some(i) = response.iter().position(|&y| y > 1) {
            return Err(Error::Argument(format!(
                "response at row {i} is not 0 or 1"
            )));
        }
        Ok(Self {
            n,
            p,
            predictors,
            response,
            names,
        })
    }

    /// Builds a dataset from per-row predictor vectors, naming columns `x1..xp`.
    pub fn from_rows(rows: &[Vec<f64>], response: Vec<u8>) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if rows.len() != response.len() {
            return Err(Error::Argument(format!(
                "{} rows but {} responses",
                rows.len(),
                response.len()
            )));
        }
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::Argument("ragged predictor rows".into()));
        }
        let names = (1..=p).map(|j| format!("x{j}")).collect();
        Self::new(p, rows.concat(), response, names)
    }

    /// Single-predictor dataset with column name `x`.
    pub fn univariate(x: &[f64], y: &[u8]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Argument("x and y lengths differ".into()));
        }
        Self::new(1, x.to_vec(), y.to_vec(), vec!["x".into()])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn response(&self) -> &[u8] {
        &self.response
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.predictors[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.n).map(move |i| self.row(i))
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.predictors[i * self.p + j])
    }

    /// Number of observations with response 1.
    pub fn positives(&self) -> usize {
        self.response.iter().filter(|&&y| y == 1).count()
    }

    pub fn has_both_classes(&self) -> bool {
        let k = self.positives();
        k > 0 && k < self.n
    }

    /// The rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        let mut predictors = Vec::with_capacity(indices.len() * self.p);
        let mut response = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.n {
                return Err(Error::Argument(format!("row index {i} out of range")));
            }
            predictors.extend_from_slice(self.row(i));
            response.push(self.response[i]);
        }
        Dataset::new(self.p, predictors, response, self.names.clone())
    }

    /// Copy with every response flipped.
    pub fn complement(&self) -> Dataset {
        Dataset {
            response: self.response.iter().map(|&y| 1 - y).collect(),
            ..self.clone()
        }
    }

    /// Copy with predictor column `j` multiplied by `c`.
    pub fn scale_column(&self, j: usize, c: f64) -> Dataset {
        let mut out = self.clone();
        for i in 0..self.n {
            out.predictors[i * self.p + j] *= c;
        }
        out
    }
}
