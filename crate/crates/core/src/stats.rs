//! The nine replicate statistics reported for test-error and AIC/BIC runs.

use crate::error::{Error, Result};

/// Summary of a replicate vector.
///
/// Skewness is `m3 / m2^1.5` and kurtosis is the non-excess `m4 / m2^2`,
/// with `1/n` central moments; `sd` uses the `n - 1` divisor and
/// `cv = 100 sd / mean`. Undefined ratios are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub median: f64,
    pub mean: f64,
    pub sd: f64,
    pub skewness: Option<f64>,
    pub kurtosis: Option<f64>,
    pub cv: Option<f64>,
    pub iqr: f64,
    pub min: f64,
    pub max: f64,
}

impl SummaryStats {
    /// Row labels in table order.
    pub const LABELS: [&'static str; 9] = [
        "median", "mean", "sd", "skewness", "kurtosis", "cv", "IQR", "min", "max",
    ];

    /// Values in [`Self::LABELS`] order.
    pub fn values(&self) -> [Option<f64>; 9] {
        [
            Some(self.median),
            Some(self.mean),
            Some(self.sd),
            self.skewness,
            self.kurtosis,
            self.cv,
            Some(self.iqr),
            Some(self.min),
            Some(self.max),
        ]
    }
}

/// Quantile of sorted data by linear interpolation between order statistics
/// (position `p (n - 1)`).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty() && (0.0..=1.0).contains(&p));
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize(values: &[f64]) -> Result<SummaryStats> {
    if values.len() < 2 {
        return Err(Error::Argument(format!(
            "summary needs at least 2 values, got {}",
            values.len()
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Argument("summary values must be finite".into()));
    }
    let n = values.len() as f64;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);

    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let sd = (m2 / (n - 1.0)).sqrt();
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    let (skewness, kurtosis) = if m2 > 0.0 {
        (Some(m3 / m2.powf(1.5)), Some(m4 / (m2 * m2)))
    } else {
        (None, None)
    };
    let cv = (mean != 0.0).then(|| 100.0 * sd / mean);

    Ok(SummaryStats {
        median: quantile_sorted(&sorted, 0.5),
        mean,
        sd,
        skewness,
        kurtosis,
        cv,
        iqr: quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
    })
}
