//! Smooth estimation of the innovation distribution of a causal AR(p) series.
//!
//! The pipeline is: fit the autoregression by Yule–Walker, form residuals,
//! smooth their empirical distribution with an integrated quartic kernel, and
//! wrap the result in a simultaneous confidence band whose half-width comes
//! from the Kolmogorov distribution. The [`montecarlo`] module replays the
//! whole pipeline over many seeded replications.
//!
//! Replications and grid evaluations run on rayon when the default
//! `parallel` feature is enabled; without it every entry point falls back to
//! a sequential loop with identical results.

pub mod arprocess;
pub mod csvio;
mod error;
pub mod exec;
pub mod kcdf;
pub mod kolmogorov;
pub mod linalg;
pub mod metrics;
pub mod montecarlo;
pub mod rng;
pub mod yulewalker;

pub use arprocess::{ArModel, Series};
pub use error::{Error, Result};
pub use exec::Execution;
pub use kcdf::{Kernel, SmoothCdf, StepCdf};
pub use kolmogorov::Band;
pub use metrics::{Cdf, DeviationReport};
pub use rng::{ErrorLaw, RngState};
pub use yulewalker::{AutocovSet, FittedAr, ResidualSet};
