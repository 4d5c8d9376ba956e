//! Kolmogorov distribution and simultaneous confidence bands.

use crate::metrics::Cdf;
use crate::{Error, Result};

const TERM_TOL: f64 = 1e-14;
const MAX_TERMS: usize = 10_000;
/// Below this argument the theta-function form is summed instead.
pub const DUAL_FORM_BELOW: f64 = 0.2;
/// Sample size from which the asymptotic critical values are trusted.
pub const MIN_BAND_N: usize = 50;

/// `L(Q) = 1 - 2 Σ_{j≥1} (-1)^{j-1} exp(-2 j² Q²)`.
pub fn kolmogorov_cdf(q: f64) -> Result<f64> {
    if !(q > 0.0) {
        return Err(Error::InvalidArgument(format!("Kolmogorov argument must be positive, got {q}")));
    }
    let v = if q < DUAL_FORM_BELOW {
        kolmogorov_cdf_dual(q)
    } else {
        kolmogorov_cdf_alternating(q)
    };
    Ok(v.clamp(0.0, 1.0))
}

/// Alternating series, unclamped.
pub fn kolmogorov_cdf_alternating(q: f64) -> f64 {
    let mut sum = 0.0;
    for j in 1..=MAX_TERMS {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * q * q).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < TERM_TOL {
            break;
        }
    }
    1.0 - 2.0 * sum
}

/// `√(2π)/Q Σ_{j≥1} exp(-(2j-1)² π² / (8 Q²))`, unclamped.
pub fn kolmogorov_cdf_dual(q: f64) -> f64 {
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    let mut sum = 0.0;
    for j in 1..=MAX_TERMS {
        let k = (2 * j - 1) as f64;
        let term = (-k * k * pi2 / (8.0 * q * q)).exp();
        sum += term;
        if term < TERM_TOL {
            break;
        }
    }
    (2.0 * std::f64::consts::PI).sqrt() / q * sum
}

/// Solves `L(Q) = p` by bisection on `[0.01, 5]`.
pub fn kolmogorov_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("probability {p} outside (0, 1)")));
    }
    let (mut lo, mut hi) = (0.01f64, 5.0f64);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_cdf(mid)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `[max(0, F(z) - c), min(1, F(z) + c)]` around an estimator `F`.
#[derive(Clone, Debug)]
pub struct Band<C> {
    pub center: C,
    pub halfwidth: f64,
    /// Confidence level `1 - alpha`.
    pub level: f64,
}

impl<C: Cdf> Band<C> {
    pub fn center_at(&self, z: f64) -> f64 {
        self.center.eval(z)
    }

    pub fn lower(&self, z: f64) -> f64 {
        (self.center.eval(z) - self.halfwidth).max(0.0)
    }

    pub fn upper(&self, z: f64) -> f64 {
        (self.center.eval(z) + self.halfwidth).min(1.0)
    }

    /// `(lower, center, upper)` at `z`.
    pub fn at(&self, z: f64) -> (f64, f64, f64) {
        let c = self.center.eval(z);
        ((c - self.halfwidth).max(0.0), c, (c + self.halfwidth).min(1.0))
    }
}

/// Half-width `L_{1-alpha} / √n`.
pub fn halfwidth(n: usize, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} outside (0, 1)")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("band needs n >= 1".into()));
    }
    Ok(kolmogorov_quantile(1.0 - alpha)? / (n as f64).sqrt())
}

pub fn build_band<C: Cdf>(center: C, n: usize, alpha: f64) -> Result<Band<C>> {
    if n < MIN_BAND_N {
        log::warn!("n = {n} is below {MIN_BAND_N}; using asymptotic Kolmogorov constants anyway");
    }
    Ok(Band {
        center,
        halfwidth: halfwidth(n, alpha)?,
        level: 1.0 - alpha,
    })
}

/// Whether `lower ≤ truth ≤ upper` at every grid point. An empty grid covers nothing.
pub fn covers<C: Cdf, T: Cdf + ?Sized>(band: &Band<C>, truth: &T, grid: &[f64]) -> bool {
    !grid.is_empty()
        && grid.iter().all(|&z| {
            let (lo, _, hi) = band.at(z);
            let t = truth.eval(z);
            lo <= t && t <= hi
        })
}
