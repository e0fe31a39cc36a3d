//! Closed-form first-order estimators for univariate no-intercept models.
//!
//! Expanding each link's log-likelihood score around `beta = 0` and keeping
//! the linear term gives an estimate proportional to one shared kernel
//! `(2 sum x y - sum x) / sum x^2`; the links differ only in the factor.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::{Error, Result};

/// Truncated expansion constants: `c1 ~ sqrt(2/pi)`, `c2 ~ 1/pi`.
///
/// Kept truncated, so the probit/logit ratio is
/// `c1 / (4 c2) = 0.626_6...` rather than the rounded 0.625.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorConstants {
    pub c1: f64,
    pub c2: f64,
}

/// Truncated constants; `c2` is 1/pi to five digits.
#[allow(clippy::approx_constant)]
pub const TAYLOR: TaylorConstants = TaylorConstants {
    c1: 0.797_885,
    c2: 0.318_31,
};

/// Probit/logit ratio as commonly quoted after rounding.
pub const ROUNDED_PROBIT_RATIO: f64 = 0.625;

/// `(x_i, y_i)` pairs for a univariate model without intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariateSample {
    x: Vec<f64>,
    y: Vec<u8>,
}

impl UnivariateSample {
    pub fn new(x: Vec<f64>, y: Vec<u8>) -> Result<Self> {
        if x.is_empty() || x.len() != y.len() {
            return Err(Error::Argument(format!(
                "need matching nonempty x and y, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        if y.iter().any(|&v| v > 1) {
            return Err(Error::Argument("responses must be 0 or 1".into()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("predictors must be finite".into()));
        }
        if x.iter().all(|&v| v == 0.0) {
            return Err(Error::Degenerate(
                "sum of squared predictors is zero".into(),
            ));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[u8] {
        &self.y
    }

    /// The same predictors with every response flipped.
    pub fn complement(&self) -> Self {
        Self {
            x: self.x.clone(),
            y: self.y.iter().map(|&v| 1 - v).collect(),
        }
    }
}

/// `(2 sum x y - sum x) / sum x^2`.
///
/// The numerator is accumulated as `sum (2y - 1) x`, so flipping every
/// response negates the kernel exactly.
pub fn shared_kernel(s: &UnivariateSample) -> f64 {
    let (mut num, mut sxx) = (0.0, 0.0);
    for (&x, &y) in s.x.iter().zip(&s.y) {
        num += if y == 1 { x } else { -x };
        sxx += x * x;
    }
    num / sxx
}

pub fn beta_cf_logit(s: &UnivariateSample) -> f64 {
    2.0 * shared_kernel(s)
}

pub fn beta_cf_probit(s: &UnivariateSample) -> f64 {
    TAYLOR.c1 / (2.0 * TAYLOR.c2) * shared_kernel(s)
}

pub fn beta_cf_cauchit(s: &UnivariateSample) -> f64 {
    FRAC_PI_2 * shared_kernel(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioIdentities {
    pub probit_over_logit: f64,
    pub cauchit_over_logit: f64,
}

/// Ratios of the closed-form estimators to the logit one.
pub fn ratio_identities() -> RatioIdentities {
    RatioIdentities {
        probit_over_logit: TAYLOR.c1 / (4.0 * TAYLOR.c2),
        cauchit_over_logit: FRAC_PI_4,
    }
}
