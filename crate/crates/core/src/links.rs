//! The four link functions: CDFs, quantiles (the links proper) and densities.

use std::f64::consts::{FRAC_1_PI, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::special::{norm_cdf, norm_pdf, norm_quantile};

/// Lower clamp applied to every CDF value; the upper clamp is `1 - CDF_EPS`.
pub const CDF_EPS: f64 = 1e-15;

/// Median of the complementary log-log CDF, `ln(ln 2)`.
pub const COMPIT_MEDIAN: f64 = -0.366_512_920_581_664_35;

/// Scale that maps a standard logistic variate onto an approximately standard
/// normal one.
#[inline]
pub fn logistic_normal_scale() -> f64 {
    (PI / 8.0).sqrt()
}

/// A binary regression link, identified by its inverse CDF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LinkKind {
    Probit,
    /// Complementary log-log.
    Compit,
    Cauchit,
    Logit,
}

impl LinkKind {
    /// All links in the order used for tables and CSV columns.
    pub const ALL: [LinkKind; 4] = [
        LinkKind::Probit,
        LinkKind::Compit,
        LinkKind::Cauchit,
        LinkKind::Logit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LinkKind::Probit => "probit",
            LinkKind::Compit => "compit",
            LinkKind::Cauchit => "cauchit",
            LinkKind::Logit => "logit",
        }
    }

    /// True when `F(-u) = 1 - F(u)`.
    pub fn is_symmetric(self) -> bool {
        !matches!(self, LinkKind::Compit)
    }

    /// `F^{-1}(1/2)`: the linear-predictor threshold of the majority-rule classifier.
    pub fn median(self) -> f64 {
        match self {
            LinkKind::Compit => COMPIT_MEDIAN,
            _ => 0.0,
        }
    }

    /// Whether the Bernoulli log-likelihood is concave in the linear predictor.
    pub fn log_concave(self) -> bool {
        !matches!(self, LinkKind::Cauchit)
    }

    /// `F(u)` clamped to `[CDF_EPS, 1 - CDF_EPS]`.
    pub fn cdf(self, u: f64) -> Result<f64> {
        check_finite(u)?;
        Ok(self.probabilities(u).0)
    }

    /// The link `g(v) = F^{-1}(v)` for `v` in (0, 1).
    pub fn quantile(self, v: f64) -> Result<f64> {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::Domain(format!(
                "{} quantile needs a probability in (0, 1), got {v}",
                self.name()
            )));
        }
        Ok(match self {
            LinkKind::Probit => norm_quantile(v),
            LinkKind::Compit => (-(-v).ln_1p()).ln(),
            LinkKind::Cauchit => {
                if v < 0.5 {
                    -1.0 / (PI * v).tan()
                } else if v > 0.5 {
                    1.0 / (PI * (1.0 - v)).tan()
                } else {
                    0.0
                }
            }
            LinkKind::Logit => v.ln() - (-v).ln_1p(),
        })
    }

    /// Density `f(u) = F'(u)`.
    pub fn density(self, u: f64) -> Result<f64> {
        check_finite(u)?;
        Ok(self.raw_density(u))
    }

    /// Unclamped `(F(u), 1 - F(u))`, each computed without cancellation.
    pub(crate) fn raw_cdf_pair(self, u: f64) -> (f64, f64) {
        match self {
            LinkKind::Probit => (norm_cdf(u), norm_cdf(-u)),
            LinkKind::Logit => (logistic(u), logistic(-u)),
            LinkKind::Cauchit => (cauchy_cdf(u), cauchy_cdf(-u)),
            LinkKind::Compit => {
                let e = u.exp();
                (-(-e).exp_m1(), (-e).exp())
            }
        }
    }

    /// Clamped `(pi, 1 - pi)` with a flag telling whether the clamp was active.
    pub(crate) fn clamped_pair(self, u: f64) -> (f64, f64, bool) {
        let (f, s) = self.raw_cdf_pair(u);
        if f < CDF_EPS {
            (CDF_EPS, 1.0 - CDF_EPS, true)
        } else if s < CDF_EPS {
            (1.0 - CDF_EPS, CDF_EPS, true)
        } else {
            (f, s, false)
        }
    }

    /// Clamped `(pi, 1 - pi)`.
    pub(crate) fn probabilities(self, u: f64) -> (f64, f64) {
        let (f, s, _) = self.clamped_pair(u);
        (f, s)
    }

    pub(crate) fn raw_density(self, u: f64) -> f64 {
        match self {
            LinkKind::Probit => norm_pdf(u),
            LinkKind::Logit => {
                let e = (-u.abs()).exp();
                e / ((1.0 + e) * (1.0 + e))
            }
            LinkKind::Cauchit => FRAC_1_PI / (1.0 + u * u),
            LinkKind::Compit => (u - u.exp()).exp(),
        }
    }

    /// `f'(u)`.
    pub(crate) fn density_slope(self, u: f64) -> f64 {
        let f = self.raw_density(u);
        match self {
            LinkKind::Probit => -u * f,
            LinkKind::Logit => -f * (0.5 * u).tanh(),
            LinkKind::Cauchit => {
                let d = 1.0 + u * u;
                -2.0 * u * FRAC_1_PI / (d * d)
            }
            LinkKind::Compit => f * (1.0 - u.exp()),
        }
    }
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LinkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "probit" => Ok(LinkKind::Probit),
            "compit" => Ok(LinkKind::Compit),
            "cauchit" => Ok(LinkKind::Cauchit),
            "logit" => Ok(LinkKind::Logit),
            other => Err(Error::Argument(format!(
                "unknown link '{other}' (expected probit, compit, cauchit or logit)"
            ))),
        }
    }
}

/// Parses a comma-separated link list such as `probit,logit`.
pub fn parse_link_list(s: &str) -> Result<Vec<LinkKind>> {
    let links = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect::<Result<Vec<_>>>()?;
    if links.is_empty() {
        return Err(Error::Argument("empty link list".into()));
    }
    Ok(links)
}

fn check_finite(u: f64) -> Result<()> {
    if u.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "linear predictor must be finite, got {u}"
        )))
    }
}

#[inline]
fn logistic(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

#[inline]
fn cauchy_cdf(u: f64) -> f64 {
    if u < 0.0 {
        // atan(u) + pi/2 = atan(-1/u) for u < 0, without cancellation.
        (-1.0 / u).atan() * FRAC_1_PI
    } else {
        0.5 + u.atan() * FRAC_1_PI
    }
}
