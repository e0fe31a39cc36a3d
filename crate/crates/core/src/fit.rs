//! Maximum-likelihood fitting of binary regression models.
//!
//! The solver is Newton's method on the observed information with step
//! halving. Steps are only accepted when the log-likelihood does not go down.
//! Cauchit likelihoods are not concave, so whenever the Newton direction is
//! not an ascent direction the solver takes a backtracking gradient step
//! instead.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve, CompensatedSum};
use crate::links::LinkKind;

/// Link plus the intercept choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelSpec {
    pub link: LinkKind,
    pub intercept: bool,
}

impl ModelSpec {
    pub fn new(link: LinkKind, intercept: bool) -> Self {
        Self { link, intercept }
    }

    /// Number of coefficients for `p` predictors.
    pub fn n_coef(&self, p: usize) -> usize {
        p + usize::from(self.intercept)
    }

    /// `eta(x)`; the intercept, when present, is `beta[0]`.
    #[inline]
    pub fn linear_predictor(&self, beta: &[f64], x: &[f64]) -> f64 {
        let (b0, slopes) = if self.intercept {
            (beta[0], &beta[1..])
        } else {
            (0.0, beta)
        };
        slopes.iter().zip(x).fold(b0, |acc, (b, v)| acc + b * v)
    }

    pub(crate) fn check_beta(&self, beta: &[f64], p: usize) -> Result<()> {
        let k = self.n_coef(p);
        if beta.len() != k {
            return Err(Error::Argument(format!(
                "{} coefficients given, model needs {k}",
                beta.len()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Convergence threshold on the infinity norm of the score.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitWarning {
    /// Some coefficient exceeds 30 in absolute value on the standardized scale.
    SeparationSuspected,
    MaxIterationsReached,
    /// Neither the Newton nor the gradient direction improved the likelihood.
    LineSearchStalled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub spec: ModelSpec,
    pub coefficients: Vec<f64>,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub n_obs: usize,
    pub iterations: usize,
    pub converged: bool,
    pub grad_norm: f64,
    pub warnings: Vec<FitWarning>,
    /// Log-likelihood after each accepted iteration, starting at `beta = 0`;
    /// the final Newton polishing steps are not recorded.
    pub trace: Vec<f64>,
}

impl FitResult {
    pub fn n_coef(&self) -> usize {
        self.coefficients.len()
    }

    /// Usable for downstream summaries: converged to a finite stationary point.
    pub fn is_usable(&self) -> bool {
        self.converged && self.coefficients.iter().all(|b| b.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InformationCriteria {
    pub aic: f64,
    pub bic: f64,
}

/// AIC `2k - 2l` and BIC `k ln n - 2l` of a fit.
pub fn information_criteria(fit: &FitResult, n: usize) -> InformationCriteria {
    criteria(fit.n_coef(), fit.loglik, n)
}

pub(crate) fn criteria(k: usize, loglik: f64, n: usize) -> InformationCriteria {
    let k = k as f64;
    InformationCriteria {
        aic: 2.0 * k - 2.0 * loglik,
        bic: k * (n as f64).ln() - 2.0 * loglik,
    }
}

fn check_dims(spec: &ModelSpec, beta: &[f64], data: &Dataset) -> Result<()> {
    spec.check_beta(beta, data.p())?;
    if beta.iter().any(|b| !b.is_finite()) {
        return Err(Error::Argument("coefficients must be finite".into()));
    }
    Ok(())
}

/// Bernoulli log-likelihood `sum y ln pi + (1 - y) ln(1 - pi)` with clamped `pi`.
pub fn log_likelihood(spec: &ModelSpec, beta: &[f64], data: &Dataset) -> Result<f64> {
    check_dims(spec, beta, data)?;
    Ok(loglik_unchecked(spec, beta, data))
}

fn loglik_unchecked(spec: &ModelSpec, beta: &[f64], data: &Dataset) -> f64 {
    let mut acc = CompensatedSum::default();
    for (x, &y) in data.rows().zip(data.response()) {
        let eta = spec.linear_predictor(beta, x);
        let (pi, q) = spec.link.probabilities(eta);
        acc.add(if y == 1 { pi.ln() } else { q.ln() });
    }
    acc.value()
}

/// First and second derivative of one observation's log-likelihood with
/// respect to its linear predictor. Both vanish where the clamp is active.
#[inline]
fn eta_derivatives(link: LinkKind, eta: f64, y: u8) -> (f64, f64) {
    let (pi, q, clamped) = link.clamped_pair(eta);
    if clamped {
        return (0.0, 0.0);
    }
    let f = link.raw_density(eta);
    let fp = link.density_slope(eta);
    if y == 1 {
        let r = f / pi;
        (r, fp / pi - r * r)
    } else {
        let r = f / q;
        (-r, -fp / q - r * r)
    }
}

fn design_row(spec: &ModelSpec, x: &[f64], out: &mut Vec<f64>) {
    out.clear();
    if spec.intercept {
        out.push(1.0);
    }
    out.extend_from_slice(x);
}

fn loglik_and_score(spec: &ModelSpec, beta: &[f64], data: &Dataset) -> (f64, Vec<f64>) {
    let k = beta.len();
    let mut ll = CompensatedSum::default();
    let mut grad = vec![CompensatedSum::default(); k];
    let mut row = Vec::with_capacity(k);
    for (x, &y) in data.rows().zip(data.response()) {
        let eta = spec.linear_predictor(beta, x);
        let (pi, q) = spec.link.probabilities(eta);
        ll.add(if y == 1 { pi.ln() } else { q.ln() });
        let (d1, _) = eta_derivatives(spec.link, eta, y);
        if d1 != 0.0 {
            design_row(spec, x, &mut row);
            for (g, v) in grad.iter_mut().zip(&row) {
                g.add(d1 * v);
            }
        }
    }
    (
        ll.value(),
        grad.into_iter().map(CompensatedSum::value).collect(),
    )
}

/// Gradient of [`log_likelihood`] with respect to the coefficients.
pub fn score(spec: &ModelSpec, beta: &[f64], data: &Dataset) -> Result<Vec<f64>> {
    check_dims(spec, beta, data)?;
    Ok(loglik_and_score(spec, beta, data).1)
}

/// Observed information `-d^2 l / d beta^2`, row-major `k x k`.
pub fn observed_information(spec: &ModelSpec, beta: &[f64], data: &Dataset) -> Result<Vec<f64>> {
    check_dims(spec, beta, data)?;
    Ok(info_unchecked(spec, beta, data))
}

fn info_unchecked(spec: &ModelSpec, beta: &[f64], data: &Dataset) -> Vec<f64> {
    let k = beta.len();
    let mut info = vec![0.0; k * k];
    let mut row = Vec::with_capacity(k);
    for (x, &y) in data.rows().zip(data.response()) {
        let eta = spec.linear_predictor(beta, x);
        let (_, d2) = eta_derivatives(spec.link, eta, y);
        if d2 == 0.0 {
            continue;
        }
        design_row(spec, x, &mut row);
        for a in 0..k {
            let w = -d2 * row[a];
            for b in 0..=a {
                info[a * k + b] += w * row[b];
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            info[b * k + a] = info[a * k + b];
        }
    }
    info
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| f64::max(m, x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const RIDGE: f64 = 1e-10;
const MAX_HALVINGS: usize = 30;
/// A column whose squared multiple correlation with the earlier ones exceeds
/// `1 - MIN_REL_PIVOT` makes the information numerically singular.
const MIN_REL_PIVOT: f64 = 1e-10;
const SEPARATION_THRESHOLD: f64 = 30.0;
/// Full Newton steps taken once the line search has converged or stalled.
const POLISH_STEPS: usize = 4;

struct Point {
    beta: Vec<f64>,
    loglik: f64,
    grad: Vec<f64>,
    grad_norm: f64,
}

impl Point {
    fn at(spec: &ModelSpec, beta: Vec<f64>, data: &Dataset) -> Point {
        let (loglik, grad) = loglik_and_score(spec, &beta, data);
        let grad_norm = inf_norm(&grad);
        Point {
            beta,
            loglik,
            grad,
            grad_norm,
        }
    }

    fn improves_on(&self, other: &Point) -> bool {
        self.loglik.is_finite()
            && (self.loglik > other.loglik
                || (self.loglik == other.loglik && self.grad_norm < other.grad_norm))
    }
}

/// Backtracking along `dir` from `start`, first trying step length `t0`.
fn line_search(
    spec: &ModelSpec,
    data: &Dataset,
    start: &Point,
    dir: &[f64],
    t0: f64,
) -> Option<Point> {
    let mut t = t0;
    for _ in 0..=MAX_HALVINGS {
        let beta: Vec<f64> = start.beta.iter().zip(dir).map(|(b, d)| b + t * d).collect();
        if beta.iter().all(|b| b.is_finite()) {
            let cand = Point::at(spec, beta, data);
            if cand.improves_on(start) {
                return Some(cand);
            }
        }
        t *= 0.5;
    }
    None
}

/// Newton direction from the ridged observed information, or `None` when the
/// information is not positive definite.
fn newton_direction(k: usize, info: &mut [f64], grad: &[f64]) -> Option<Vec<f64>> {
    for i in 0..k {
        info[i * k + i] += RIDGE;
    }
    let l = cholesky(k, info, MIN_REL_PIVOT)?;
    Some(cholesky_solve(k, &l, grad))
}

fn separation_suspected(spec: &ModelSpec, beta: &[f64], data: &Dataset) -> bool {
    let n = data.n() as f64;
    let offset = usize::from(spec.intercept);
    let mut centre_shift = 0.0;
    for j in 0..data.p() {
        let mean = data.column(j).sum::<f64>() / n;
        let var = data.column(j).map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let b = beta[offset + j];
        centre_shift += b * mean;
        if (b * var.sqrt()).abs() > SEPARATION_THRESHOLD {
            return true;
        }
    }
    spec.intercept && (beta[0] + centre_shift).abs() > SEPARATION_THRESHOLD
}

/// Maximum-likelihood fit starting from `beta = 0`.
pub fn fit_mle(spec: &ModelSpec, data: &Dataset, options: &FitOptions) -> Result<FitResult> {
    if options.tol.is_nan() || options.tol <= 0.0 || options.max_iter == 0 {
        return Err(Error::Argument(
            "tolerance must be positive and max_iter at least 1".into(),
        ));
    }
    let k = spec.n_coef(data.p());
    if k > 0 && !data.has_both_classes() {
        return Err(Error::Separation(format!(
            "response has a single class ({} of {} are 1); the MLE does not exist",
            data.positives(),
            data.n()
        )));
    }

    let mut point = Point::at(spec, vec![0.0; k], data);
    let mut trace = vec![point.loglik];
    let mut warnings = Vec::new();
    let mut converged = point.grad_norm <= options.tol;
    let mut iterations = 0;
    let mut stalled = false;

    while !converged && iterations < options.max_iter {
        iterations += 1;
        let mut info = info_unchecked(spec, &point.beta, data);
        let newton = newton_direction(k, &mut info, &point.grad);
        let newton = match newton {
            Some(d) if dot(&d, &point.grad) > 0.0 => Some(d),
            Some(_) => None,
            None if spec.link.log_concave() => {
                return Err(Error::Numerical(format!(
                    "observed information is singular under {} at iteration {iterations}",
                    spec.link
                )));
            }
            None => None,
        };

        let mut next = newton.and_then(|d| line_search(spec, data, &point, &d, 1.0));
        if next.is_none() {
            let t0 = 1.0 / point.grad_norm.max(1.0);
            next = line_search(spec, data, &point, &point.grad.clone(), t0);
        }
        match next {
            Some(p) => {
                point = p;
                trace.push(point.loglik);
                converged = point.grad_norm <= options.tol;
            }
            None => {
                stalled = true;
                break;
            }
        }
    }
    if converged || stalled {
        // Near the optimum the log-likelihood gain drops below its rounding
        // noise, so the line search can stall short of the tolerance, and the
        // tolerance alone leaves beta loose where the information is tiny.
        for _ in 0..POLISH_STEPS {
            let mut info = info_unchecked(spec, &point.beta, data);
            let Some(d) = newton_direction(k, &mut info, &point.grad) else {
                break;
            };
            let beta: Vec<f64> = point.beta.iter().zip(&d).map(|(b, s)| b + s).collect();
            if beta.iter().any(|b| !b.is_finite()) {
                break;
            }
            let cand = Point::at(spec, beta, data);
            let slack = 1e-12 * (1.0 + point.loglik.abs());
            if !(cand.loglik >= point.loglik - slack && cand.grad_norm < point.grad_norm) {
                break;
            }
            point = cand;
        }
        converged = point.grad_norm <= options.tol;
        if stalled && !converged {
            warnings.push(FitWarning::LineSearchStalled);
        }
    }
    if !converged && iterations >= options.max_iter {
        warnings.push(FitWarning::MaxIterationsReached);
    }
    if k > 0 && separation_suspected(spec, &point.beta, data) {
        warnings.push(FitWarning::SeparationSuspected);
    }

    let ic = criteria(k, point.loglik, data.n());
    Ok(FitResult {
        spec: *spec,
        coefficients: point.beta,
        loglik: point.loglik,
        aic: ic.aic,
        bic: ic.bic,
        n_obs: data.n(),
        iterations,
        converged,
        grad_norm: point.grad_norm,
        warnings,
        trace,
    })
}
