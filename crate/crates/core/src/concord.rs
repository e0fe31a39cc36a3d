//! Majority-rule classifiers, zero-one test error, random train/test splits
//! and classifier agreement.

use rand::seq::index::sample;
use rand::Rng;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::fit::{fit_mle, FitOptions, FitResult, ModelSpec};
use crate::links::LinkKind;
use crate::par::{map_indexed, Jobs};
use crate::rng::{Purpose, StreamSeed};

/// `h(x) = 1` when `F(eta(x)) >= 1/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    spec: ModelSpec,
    coefficients: Vec<f64>,
}

/// Majority-rule decision for a linear predictor, with ties going to class 1.
///
/// `F(eta) >= 1/2` is evaluated as `eta >= F^{-1}(1/2)`; `F` is strictly
/// increasing so the two agree, and the threshold form does not lose the
/// sign of `eta` to rounding near the median.
#[inline]
pub fn decide(link: LinkKind, eta: f64) -> u8 {
    u8::from(eta >= link.median())
}

impl Classifier {
    pub fn new(spec: ModelSpec, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().any(|b| !b.is_finite()) {
            return Err(Error::Argument(
                "classifier coefficients must be finite".into(),
            ));
        }
        if spec.intercept && coefficients.is_empty() {
            return Err(Error::Argument(
                "intercept model needs at least one coefficient".into(),
            ));
        }
        Ok(Self { spec, coefficients })
    }

    pub fn from_fit(fit: &FitResult) -> Result<Self> {
        Self::new(fit.spec, fit.coefficients.clone())
    }

    pub fn spec(&self) -> ModelSpec {
        self.spec
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Number of predictors the classifier expects.
    pub fn dim(&self) -> usize {
        self.coefficients.len() - usize::from(self.spec.intercept)
    }

    /// Same link, coefficients multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.spec,
            self.coefficients.iter().map(|b| b * factor).collect(),
        )
    }

    /// Same coefficients under another link.
    pub fn with_link(&self, link: LinkKind) -> Self {
        Self {
            spec: ModelSpec { link, ..self.spec },
            coefficients: self.coefficients.clone(),
        }
    }

    fn eta(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::Argument(format!(
                "point has {} coordinates, classifier expects {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(self.spec.linear_predictor(&self.coefficients, x))
    }

    pub fn predict_prob(&self, x: &[f64]) -> Result<f64> {
        self.spec.link.cdf(self.eta(x)?)
    }

    pub fn classify(&self, x: &[f64]) -> Result<u8> {
        Ok(decide(self.spec.link, self.eta(x)?))
    }
}

/// Fraction of test rows whose label differs from the classifier's output.
pub fn test_error(c: &Classifier, test: &Dataset) -> Result<f64> {
    let mut wrong = 0usize;
    for (x, &y) in test.rows().zip(test.response()) {
        if c.classify(x)? != y {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / test.n() as f64)
}

/// Fraction of points on which two classifiers disagree.
pub fn concordance_rate(a: &Classifier, b: &Classifier, points: &[Vec<f64>]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Argument("no points to compare on".into()));
    }
    let mut differ = 0usize;
    for x in points {
        if a.classify(x)? != b.classify(x)? {
            differ += 1;
        }
    }
    Ok(differ as f64 / points.len() as f64)
}

/// Random train/test partition schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitPlan {
    pub train_fraction: f64,
    pub replications: usize,
    pub seed: u64,
}

impl SplitPlan {
    pub fn new(replications: usize, seed: u64) -> Self {
        Self {
            train_fraction: 2.0 / 3.0,
            replications,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::Argument(format!(
                "train fraction must lie in (0, 1), got {}",
                self.train_fraction
            )));
        }
        if self.replications == 0 {
            return Err(Error::Argument("need at least one replication".into()));
        }
        Ok(())
    }

    /// `ceil(train_fraction * n)`, ignoring rounding noise in the product.
    pub fn train_size(&self, n: usize) -> usize {
        (self.train_fraction * n as f64 - 1e-9).ceil() as usize
    }

    /// Sorted `(train, test)` row indices for replicate `r`.
    pub fn indices(&self, n: usize, r: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        self.validate()?;
        if n < 3 {
            return Err(Error::Argument(format!(
                "need at least 3 rows to split, got {n}"
            )));
        }
        let n_train = self.train_size(n);
        if n_train == 0 || n_train >= n {
            return Err(Error::Argument(format!(
                "train fraction {} leaves an empty side for n = {n}",
                self.train_fraction
            )));
        }
        let mut rng = StreamSeed(self.seed).stream(Purpose::Split, r as u64);
        let mut in_train = vec![false; n];
        for i in sample(&mut rng, n, n_train) {
            in_train[i] = true;
        }
        let (train, test): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| in_train[i]);
        Ok((train, test))
    }
}

/// Replicate `r` of the plan as `(train, test)` datasets.
pub fn split(data: &Dataset, plan: &SplitPlan, r: usize) -> Result<(Dataset, Dataset)> {
    let (train, test) = plan.indices(data.n(), r)?;
    Ok((data.subset(&train)?, data.subset(&test)?))
}

/// Test errors over all replicates; failed fits are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct AteReport {
    pub ate: f64,
    pub per_replicate: Vec<Option<f64>>,
    pub failed: usize,
}

/// Fits on one replicate's training rows; non-converged fits count as failures.
pub(crate) fn fit_replicate(spec: &ModelSpec, train: &Dataset) -> Option<FitResult> {
    fit_mle(spec, train, &FitOptions::default())
        .ok()
        .filter(FitResult::is_usable)
}

pub(crate) fn mean_of_present(values: &[Option<f64>]) -> Option<f64> {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    (!present.is_empty()).then(|| present.iter().sum::<f64>() / present.len() as f64)
}

pub fn average_test_error(
    spec: &ModelSpec,
    data: &Dataset,
    plan: &SplitPlan,
    jobs: Jobs,
) -> Result<AteReport> {
    plan.validate()?;
    if !data.has_both_classes() {
        return Err(Error::Separation("response has a single class".into()));
    }
    plan.indices(data.n(), 0)?;
    let per_replicate = map_indexed(plan.replications, jobs, |r| {
        let (train, test) = split(data, plan, r).ok()?;
        let fit = fit_replicate(spec, &train)?;
        test_error(&Classifier::from_fit(&fit).ok()?, &test).ok()
    });
    let failed = per_replicate.iter().filter(|v| v.is_none()).count();
    let ate = mean_of_present(&per_replicate).ok_or_else(|| {
        Error::Experiment(format!(
            "all {} replicates failed to fit",
            plan.replications
        ))
    })?;
    Ok(AteReport {
        ate,
        per_replicate,
        failed,
    })
}

/// How the evaluation points of the sign grid are placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMode {
    Equispaced,
    UniformRandom { seed: u64 },
}

impl GridMode {
    pub fn name(&self) -> &'static str {
        match self {
            GridMode::Equispaced => "equispaced",
            GridMode::UniformRandom { .. } => "random",
        }
    }
}

/// Pairwise disagreement fractions between links' sign decisions.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcordanceMatrix {
    pub links: Vec<LinkKind>,
    /// `counts[i][j]`: points where links `i` and `j` disagree.
    pub counts: Vec<Vec<usize>>,
    pub rates: Vec<Vec<f64>>,
    pub points: usize,
    pub mode: GridMode,
}

/// Points of the sign grid on `[a, b]`.
pub fn grid_points(a: f64, b: f64, s: usize, mode: GridMode) -> Result<Vec<f64>> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Argument(format!(
            "need finite a < b, got [{a}, {b}]"
        )));
    }
    if s < 2 {
        return Err(Error::Argument(format!("need at least 2 points, got {s}")));
    }
    Ok(match mode {
        GridMode::Equispaced => (0..s)
            .map(|i| a + (b - a) * i as f64 / (s - 1) as f64)
            .collect(),
        GridMode::UniformRandom { seed } => {
            let mut rng = StreamSeed(seed).stream(Purpose::Grid, 0);
            (0..s).map(|_| rng.random_range(a..b)).collect()
        }
    })
}

/// For each point `u`, each link votes `sign(F(u) - 1/2)` (zero counts as
/// positive); the matrix holds pairwise disagreement fractions.
pub fn sign_disagreement_grid(
    links: &[LinkKind],
    a: f64,
    b: f64,
    s: usize,
    mode: GridMode,
) -> Result<ConcordanceMatrix> {
    if links.is_empty() {
        return Err(Error::Argument("no links given".into()));
    }
    let points = grid_points(a, b, s, mode)?;
    let votes: Vec<Vec<u8>> = links
        .iter()
        .map(|&l| points.iter().map(|&u| decide(l, u)).collect())
        .collect();
    let k = links.len();
    let mut counts = vec![vec![0usize; k]; k];
    for i in 0..k {
        for j in 0..i {
            let c = votes[i]
                .iter()
                .zip(&votes[j])
                .filter(|(x, y)| x != y)
                .count();
            counts[i][j] = c;
            counts[j][i] = c;
        }
    }
    let rates = counts
        .iter()
        .map(|row| row.iter().map(|&c| c as f64 / s as f64).collect())
        .collect();
    Ok(ConcordanceMatrix {
        links: links.to_vec(),
        counts,
        rates,
        points: s,
        mode,
    })
}
