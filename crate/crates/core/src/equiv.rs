//! Monte-Carlo harnesses for structural equivalence (probit-on-logit slope
//! regression over simulated datasets) and predictive equivalence (test error
//! and AIC/BIC over repeated train/test splits).
//!
//! Each replicate draws from its own counter-based stream and results are
//! collected in replicate order, so every report is a pure function of its
//! inputs whatever the thread count.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::concord::{fit_replicate, split, test_error, Classifier, SplitPlan};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::fit::ModelSpec;
use crate::links::LinkKind;
use crate::par::{map_indexed, Jobs};
use crate::rng::{Purpose, StreamSeed};
use crate::stats::{summarize, SummaryStats};

/// Placement of the predictor values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Design {
    /// `x_i = a + (b - a)(i - 1)/(n - 1)`.
    Equispaced { a: f64, b: f64 },
    /// i.i.d. normal draws.
    Gaussian { mean: f64, sd: f64 },
}

/// Data-generating process for a univariate binary regression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenConfig {
    pub design: Design,
    pub truth: LinkKind,
    pub beta0: f64,
    pub beta1: f64,
    pub n: usize,
}

impl GenConfig {
    /// Equispaced `[0, 1]`, cauchit truth with slope 1/2 and no intercept, 199 points.
    pub fn equispaced_cauchit() -> Self {
        Self {
            design: Design::Equispaced { a: 0.0, b: 1.0 },
            truth: LinkKind::Cauchit,
            beta0: 0.0,
            beta1: 0.5,
            n: 199,
        }
    }

    /// `x ~ N(0, 2^2)`, cauchit truth with intercept 1 and slope 2.
    pub fn gaussian_cauchit(n: usize) -> Self {
        Self {
            design: Design::Gaussian { mean: 0.0, sd: 2.0 },
            truth: LinkKind::Cauchit,
            beta0: 1.0,
            beta1: 2.0,
            n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Argument(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if !(self.beta0.is_finite() && self.beta1.is_finite()) {
            return Err(Error::Argument("coefficients must be finite".into()));
        }
        match self.design {
            Design::Equispaced { a, b } if !(a.is_finite() && b.is_finite() && a < b) => Err(
                Error::Argument(format!("equispaced design needs a < b, got [{a}, {b}]")),
            ),
            Design::Gaussian { mean, sd } if !(mean.is_finite() && sd.is_finite() && sd > 0.0) => {
                Err(Error::Argument(format!(
                    "gaussian design needs sd > 0, got {sd}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Whether fitted models include an intercept: only when the truth has one.
    pub fn fits_intercept(&self) -> bool {
        self.beta0 != 0.0
    }

    fn generate_with<R: Rng>(&self, rng: &mut R) -> Result<Dataset> {
        let n = self.n;
        let x: Vec<f64> = match self.design {
            Design::Equispaced { a, b } => (0..n)
                .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                .collect(),
            Design::Gaussian { mean, sd } => (0..n)
                .map(|_| mean + sd * rng.sample::<f64, _>(StandardNormal))
                .collect(),
        };
        let y = x
            .iter()
            .map(|&xi| {
                let pi = self.truth.cdf(self.beta0 + self.beta1 * xi)?;
                Ok(u8::from(rng.random::<f64>() < pi))
            })
            .collect::<Result<Vec<u8>>>()?;
        Dataset::univariate(&x, &y)
    }
}

/// Dataset number `index` drawn from `cfg` under `seed`.
pub fn generate_dataset(cfg: &GenConfig, seed: u64, index: u64) -> Result<Dataset> {
    cfg.validate()?;
    cfg.generate_with(&mut StreamSeed(seed).stream(Purpose::Dataset, index))
}

/// Simple least-squares line `y = tau + theta x` with Pearson correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlsFit {
    pub tau: f64,
    pub theta: f64,
    pub rho: f64,
    pub r2: f64,
}

pub fn ols_simple(xs: &[f64], ys: &[f64]) -> Result<OlsFit> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::Argument(format!(
            "need two equal-length vectors of at least 3 values, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx.is_nan() || sxx <= 0.0 {
        return Err(Error::Degenerate("regressor has zero variance".into()));
    }
    if syy.is_nan() || syy <= 0.0 {
        return Err(Error::Degenerate(
            "response has zero variance; correlation undefined".into(),
        ));
    }
    let theta = sxy / sxx;
    let rho = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    Ok(OlsFit {
        tau: my - theta * mx,
        theta,
        rho,
        r2: rho * rho,
    })
}

/// One replicate of the structural simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaRow {
    pub replicate: usize,
    pub fit: OlsFit,
    /// `(logit, probit)` slope estimates that survived fitting.
    pub pairs: Vec<(f64, f64)>,
    pub dropped: usize,
}

/// Per-replicate slope regressions of probit estimates on logit estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaReport {
    /// Valid replicates in replicate order.
    pub rows: Vec<ThetaRow>,
    /// Replicates with fewer than 3 surviving pairs or a degenerate regression.
    pub invalid: Vec<usize>,
    pub replications: usize,
    /// Summary of the theta estimates; needs at least two valid replicates.
    pub theta_summary: Option<SummaryStats>,
}

impl ThetaReport {
    pub fn theta_hats(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.fit.theta).collect()
    }

    pub fn tau_hats(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.fit.tau).collect()
    }

    pub fn rho_hats(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.fit.rho).collect()
    }

    pub fn r_squared(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.fit.r2).collect()
    }

    /// Failed logit/probit fits across all replicates.
    pub fn dropped_fits(&self) -> usize {
        self.rows.iter().map(|r| r.dropped).sum()
    }
}

/// For each of `reps` replicates: draw `inner` datasets, fit logit and probit
/// to each, and regress the probit slopes on the logit slopes.
pub fn structural_sim(
    cfg: &GenConfig,
    reps: usize,
    inner: usize,
    seed: u64,
    jobs: Jobs,
) -> Result<ThetaReport> {
    cfg.validate()?;
    if reps == 0 || inner < 3 {
        return Err(Error::Argument(format!(
            "need at least 1 replicate and 3 inner samples, got {reps} and {inner}"
        )));
    }
    if reps > u32::MAX as usize || inner > u32::MAX as usize {
        return Err(Error::Argument("replicate counts exceed 2^32".into()));
    }
    let intercept = cfg.fits_intercept();
    let logit = ModelSpec::new(LinkKind::Logit, intercept);
    let probit = ModelSpec::new(LinkKind::Probit, intercept);
    let slope = usize::from(intercept);
    let streams = StreamSeed(seed);

    let outcomes = map_indexed(reps, jobs, |r| -> Result<Option<ThetaRow>> {
        let mut pairs = Vec::with_capacity(inner);
        for s in 0..inner {
            let mut rng = streams.nested(Purpose::Dataset, r as u32, s as u32);
            let data = cfg.generate_with(&mut rng)?;
            let fits = (fit_replicate(&logit, &data), fit_replicate(&probit, &data));
            if let (Some(l), Some(p)) = fits {
                pairs.push((l.coefficients[slope], p.coefficients[slope]));
            }
        }
        let dropped = inner - pairs.len();
        if pairs.len() < 3 {
            return Ok(None);
        }
        let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.iter().copied().unzip();
        Ok(ols_simple(&xs, &ys).ok().map(|fit| ThetaRow {
            replicate: r,
            fit,
            pairs,
            dropped,
        }))
    });

    let mut rows = Vec::new();
    let mut invalid = Vec::new();
    for (r, outcome) in outcomes.into_iter().enumerate() {
        match outcome? {
            Some(row) => rows.push(row),
            None => invalid.push(r),
        }
    }
    if rows.is_empty() {
        return Err(Error::Experiment(format!(
            "all {reps} replicates were invalid"
        )));
    }
    let thetas: Vec<f64> = rows.iter().map(|r| r.fit.theta).collect();
    let theta_summary = if thetas.len() >= 2 {
        Some(summarize(&thetas)?)
    } else {
        None
    };
    Ok(ThetaReport {
        rows,
        invalid,
        replications: reps,
        theta_summary,
    })
}

/// Outcome of fitting one link on one replicate's training split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicateScore {
    pub test_error: f64,
    pub aic: f64,
    pub bic: f64,
}

/// Per-link results over a shared split sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationTable {
    pub links: Vec<LinkKind>,
    /// `scores[l][r]`; `None` marks a failed fit.
    pub scores: Vec<Vec<Option<ReplicateScore>>>,
    pub plan: SplitPlan,
}

impl ReplicationTable {
    pub fn column(&self, l: usize, pick: impl Fn(&ReplicateScore) -> f64) -> Vec<Option<f64>> {
        self.scores[l]
            .iter()
            .map(|s| s.as_ref().map(&pick))
            .collect()
    }

    pub fn failed(&self, l: usize) -> usize {
        self.scores[l].iter().filter(|s| s.is_none()).count()
    }

    /// Replicates where at least one link failed.
    pub fn invalid_replicates(&self) -> usize {
        (0..self.plan.replications)
            .filter(|&r| self.scores.iter().any(|col| col[r].is_none()))
            .count()
    }
}

/// Fits every link on the same train/test partitions.
pub fn replicate_links(
    data: &Dataset,
    links: &[LinkKind],
    plan: &SplitPlan,
    intercept: bool,
    jobs: Jobs,
) -> Result<ReplicationTable> {
    plan.validate()?;
    if links.is_empty() {
        return Err(Error::Argument("no links given".into()));
    }
    if !data.has_both_classes() {
        return Err(Error::Separation("response has a single class".into()));
    }
    plan.indices(data.n(), 0)?;

    let per_rep = map_indexed(
        plan.replications,
        jobs,
        |r| -> Result<Vec<Option<ReplicateScore>>> {
            let (train, test) = split(data, plan, r)?;
            Ok(links
                .iter()
                .map(|&link| {
                    let fit = fit_replicate(&ModelSpec::new(link, intercept), &train)?;
                    let te = test_error(&Classifier::from_fit(&fit).ok()?, &test).ok()?;
                    Some(ReplicateScore {
                        test_error: te,
                        aic: fit.aic,
                        bic: fit.bic,
                    })
                })
                .collect())
        },
    );

    let mut scores = vec![Vec::with_capacity(plan.replications); links.len()];
    for rep in per_rep {
        for (col, s) in scores.iter_mut().zip(rep?) {
            col.push(s);
        }
    }
    if scores.iter().all(|col| col.iter().all(Option::is_none)) {
        return Err(Error::Experiment(format!(
            "all {} replicates failed for every link",
            plan.replications
        )));
    }
    Ok(ReplicationTable {
        links: links.to_vec(),
        scores,
        plan: *plan,
    })
}

fn summarize_present(values: &[Option<f64>], what: &str, link: LinkKind) -> Result<SummaryStats> {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    summarize(&present).map_err(|e| match e {
        Error::Argument(msg) => Error::Argument(format!("{what} for {link}: {msg}")),
        other => other,
    })
}

/// Test-error replicates and their summaries, per link.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveReport {
    pub table: ReplicationTable,
    pub summaries: Vec<SummaryStats>,
}

impl PredictiveReport {
    pub fn test_errors(&self, l: usize) -> Vec<Option<f64>> {
        self.table.column(l, |s| s.test_error)
    }
}

/// Replicated test error of every link on identical splits (models with intercept).
pub fn predictive_sim(
    data: &Dataset,
    links: &[LinkKind],
    plan: &SplitPlan,
    jobs: Jobs,
) -> Result<PredictiveReport> {
    let table = replicate_links(data, links, plan, true, jobs)?;
    predictive_from_table(table)
}

pub fn predictive_from_table(table: ReplicationTable) -> Result<PredictiveReport> {
    let summaries = (0..table.links.len())
        .map(|l| {
            summarize_present(
                &table.column(l, |s| s.test_error),
                "test error",
                table.links[l],
            )
        })
        .collect::<Result<_>>()?;
    Ok(PredictiveReport { table, summaries })
}

/// AIC and BIC of every training fit, per link.
#[derive(Debug, Clone, PartialEq)]
pub struct IcReport {
    pub table: ReplicationTable,
    pub aic_summaries: Vec<SummaryStats>,
    pub bic_summaries: Vec<SummaryStats>,
}

impl IcReport {
    pub fn aic(&self, l: usize) -> Vec<Option<f64>> {
        self.table.column(l, |s| s.aic)
    }

    pub fn bic(&self, l: usize) -> Vec<Option<f64>> {
        self.table.column(l, |s| s.bic)
    }
}

pub fn ic_compare(
    data: &Dataset,
    links: &[LinkKind],
    plan: &SplitPlan,
    jobs: Jobs,
) -> Result<IcReport> {
    let table = replicate_links(data, links, plan, true, jobs)?;
    ic_from_table(table)
}

pub fn ic_from_table(table: ReplicationTable) -> Result<IcReport> {
    let k = table.links.len();
    let aic_summaries = (0..k)
        .map(|l| summarize_present(&table.column(l, |s| s.aic), "AIC", table.links[l]))
        .collect::<Result<_>>()?;
    let bic_summaries = (0..k)
        .map(|l| summarize_present(&table.column(l, |s| s.bic), "BIC", table.links[l]))
        .collect::<Result<_>>()?;
    Ok(IcReport {
        table,
        aic_summaries,
        bic_summaries,
    })
}
