//! Yule–Walker fitting with presample-aware autocovariances.
//!
//! Autocovariances are raw (uncentered) lag products over the full stretch
//! `X_{1-p}, ..., X_n`, divided by the body length `n`.

use crate::arprocess::Series;
use crate::linalg::solve_toeplitz;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct AutocovSet {
    /// `γ̂(0), ..., γ̂(p)`.
    pub gamma_hat: Vec<f64>,
    /// Divisor, the body length.
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FittedAr {
    pub phi_hat: Vec<f64>,
    pub gamma: AutocovSet,
    /// Whether the Toeplitz solve fell back to dense LU.
    pub used_fallback: bool,
}

impl FittedAr {
    pub fn order(&self) -> usize {
        self.phi_hat.len()
    }

    /// Key/value form used in CSV metadata and the `estimate` report.
    pub fn record(&self) -> Vec<(&'static str, String)> {
        vec![
            ("order", self.order().to_string()),
            ("n", self.gamma.n.to_string()),
            ("phi_hat", join(&self.phi_hat)),
            ("gamma_hat", join(&self.gamma.gamma_hat)),
        ]
    }

    /// One-step forecast `Σ φ̂_r X_{n+1-r}`.
    pub fn forecast(&self, series: &Series) -> Result<f64> {
        let values: Vec<f64> = series.values().collect();
        let p = self.order();
        if values.len() < p {
            return Err(Error::TooShort { needed: p, available: values.len() });
        }
        let last = values.len();
        Ok(self
            .phi_hat
            .iter()
            .enumerate()
            .map(|(r, phi)| phi * values[last - 1 - r])
            .sum())
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(";")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualSet {
    pub z_hat: Vec<f64>,
    pub fit: FittedAr,
}

/// The last `p` presample values followed by the body.
fn stretch(series: &Series, p: usize) -> Result<Vec<f64>> {
    if series.presample.len() < p {
        return Err(Error::InsufficientPresample {
            needed: p,
            available: series.presample.len(),
        });
    }
    let start = series.presample.len() - p;
    Ok(series.presample[start..].iter().chain(&series.body).copied().collect())
}

pub fn autocov(series: &Series, p: usize) -> Result<AutocovSet> {
    let n = series.body.len();
    if n < p + 1 {
        return Err(Error::TooShort { needed: p + 1, available: n });
    }
    let v = stretch(series, p)?;
    let gamma_hat = (0..=p)
        .map(|l| {
            let s: f64 = v.iter().zip(&v[l..]).map(|(a, b)| a * b).sum();
            s / n as f64
        })
        .collect();
    Ok(AutocovSet { gamma_hat, n })
}

pub fn fit(series: &Series, p: usize) -> Result<FittedAr> {
    if p == 0 {
        return Err(Error::InvalidArgument("AR order must be at least 1".into()));
    }
    let gamma = autocov(series, p)?;
    let sol = solve_toeplitz(&gamma.gamma_hat[..p], &gamma.gamma_hat[1..=p])?;
    Ok(FittedAr {
        phi_hat: sol.x,
        gamma,
        used_fallback: sol.used_fallback,
    })
}

/// `Ẑ_t = X_t - Σ_r φ̂_r X_{t-r}` for `t = 1..n`.
pub fn residuals(series: &Series, fit: &FittedAr) -> Result<ResidualSet> {
    let p = fit.order();
    let v = stretch(series, p)?;
    let z_hat = (p..v.len())
        .map(|t| {
            let ar: f64 = fit
                .phi_hat
                .iter()
                .enumerate()
                .map(|(r, phi)| phi * v[t - 1 - r])
                .sum();
            v[t] - ar
        })
        .collect();
    Ok(ResidualSet { z_hat, fit: fit.clone() })
}
