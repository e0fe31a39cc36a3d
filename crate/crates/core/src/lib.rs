//! Binary regression with the probit, complementary log-log, cauchit and logit
//! links, plus Monte-Carlo harnesses that compare the links structurally
//! (coefficient ratios) and predictively (test error, AIC/BIC, classifier
//! agreement).

pub mod approx;
pub mod cli;
pub mod concord;
pub mod csvio;
pub mod dataset;
pub mod equiv;
pub mod error;
pub mod fit;
mod linalg;
pub mod links;
pub mod par;
pub mod rng;
pub mod special;
pub mod stats;

pub use dataset::Dataset;
pub use error::{Error, Result};
pub use fit::{fit_mle, FitOptions, FitResult, FitWarning, ModelSpec};
pub use links::LinkKind;
pub use par::Jobs;
