//! Kernel-smoothed and empirical distribution function estimators.

use std::fmt;
use std::sync::Arc;

use crate::exec::Execution;
use crate::{Error, Result};

/// Equispaced points added to every evaluation grid.
pub const GRID_POINTS: usize = 512;

/// Quartic (biweight) density `15 (1 - u²)² / 16` on `[-1, 1]`.
pub fn quartic_density(u: f64) -> f64 {
    if u.abs() <= 1.0 {
        let w = 1.0 - u * u;
        15.0 / 16.0 * w * w
    } else {
        0.0
    }
}

/// Integrated quartic kernel `G(u) = ∫_{-∞}^u K`.
pub fn quartic_g(u: f64) -> f64 {
    if u <= -1.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        let u2 = u * u;
        15.0 / 16.0 * u * (1.0 - u2 * (2.0 / 3.0 - u2 / 5.0)) + 0.5
    }
}

pub type KernelFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Smoothing kernel supported on `[-1, 1]`. Custom kernels supply their
/// integrated form analytically.
#[derive(Clone, Default)]
pub enum Kernel {
    #[default]
    Quartic,
    Custom {
        name: String,
        density: KernelFn,
        integrated: KernelFn,
    },
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Quartic => f.write_str("Quartic"),
            Kernel::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl Kernel {
    pub fn custom<D, G>(name: impl Into<String>, density: D, integrated: G) -> Self
    where
        D: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Kernel::Custom {
            name: name.into(),
            density: Arc::new(density),
            integrated: Arc::new(integrated),
        }
    }

    pub fn density(&self, u: f64) -> f64 {
        match self {
            Kernel::Quartic => quartic_density(u),
            Kernel::Custom { density, .. } => {
                if u.abs() <= 1.0 {
                    density(u)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn integrated(&self, u: f64) -> f64 {
        match self {
            Kernel::Quartic => quartic_g(u),
            Kernel::Custom { integrated, .. } => {
                if u <= -1.0 {
                    0.0
                } else if u >= 1.0 {
                    1.0
                } else {
                    integrated(u)
                }
            }
        }
    }
}

/// `F(z) = n⁻¹ Σ G((z - c_t) / h)`.
#[derive(Clone, Debug)]
pub struct SmoothCdf {
    centers: Vec<f64>,
    h: f64,
    kernel: Kernel,
}

impl SmoothCdf {
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn bandwidth(&self) -> f64 {
        self.h
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn eval(&self, z: f64) -> f64 {
        let c = &self.centers;
        let full = c.partition_point(|&x| x <= z - self.h);
        let end = c.partition_point(|&x| x < z + self.h);
        let partial: f64 = c[full..end.max(full)]
            .iter()
            .map(|&x| self.kernel.integrated((z - x) / self.h))
            .sum();
        (full as f64 + partial) / c.len() as f64
    }

    pub fn eval_many(&self, zs: &[f64], exec: Execution) -> Vec<f64> {
        exec.map_slice(zs, |&z| self.eval(z))
    }

    /// Sorted centers, centers ± h, and [`GRID_POINTS`] equispaced points over
    /// `[min - 3h, max + 3h]`, deduplicated.
    pub fn evaluation_grid(&self) -> Vec<f64> {
        evaluation_grid(&self.centers, self.h)
    }

    /// Smallest `z` with `F(z) ≥ alpha`, by bisection to width 1e-10.
    pub fn quantile(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("level {alpha} outside (0, 1)")));
        }
        let mut lo = self.centers[0] - self.h;
        let mut hi = self.centers[self.centers.len() - 1] + self.h;
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) >= alpha {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

/// Builds the smoothed estimator. Non-finite centers and non-positive
/// bandwidths are rejected.
pub fn smooth_cdf(centers: &[f64], h: f64, kernel: Kernel) -> Result<SmoothCdf> {
    if centers.is_empty() {
        return Err(Error::TooShort { needed: 1, available: 0 });
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("bandwidth must be positive, got {h}")));
    }
    if centers.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("centers must be finite".into()));
    }
    let mut centers = centers.to_vec();
    centers.sort_by(f64::total_cmp);
    Ok(SmoothCdf { centers, h, kernel })
}

/// Right-continuous empirical distribution function.
#[derive(Clone, Debug)]
pub struct StepCdf {
    sorted: Vec<f64>,
}

impl StepCdf {
    pub fn points(&self) -> &[f64] {
        &self.sorted
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.sorted.partition_point(|&x| x <= z) as f64 / self.sorted.len() as f64
    }

    pub fn left_limit(&self, z: f64) -> f64 {
        self.sorted.partition_point(|&x| x < z) as f64 / self.sorted.len() as f64
    }
}

pub fn step_cdf(points: &[f64]) -> Result<StepCdf> {
    if points.is_empty() {
        return Err(Error::TooShort { needed: 1, available: 0 });
    }
    if points.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("points must not be NaN".into()));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(StepCdf { sorted })
}

/// Sample quantile by linear interpolation of order statistics at plotting
/// position `(k - 1) / (n - 1)` (Hyndman–Fan type 7). `sorted` must be sorted.
pub fn type7_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let pos = p * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

pub fn iqr(values: &[f64]) -> f64 {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    type7_quantile(&s, 0.75) - type7_quantile(&s, 0.25)
}

/// `h = IQR · n^{-1/3}`.
pub fn bandwidth_rule(residuals: &[f64]) -> Result<f64> {
    let n = residuals.len();
    if n < 4 {
        return Err(Error::TooShort { needed: 4, available: n });
    }
    let spread = iqr(residuals);
    if !(spread > 0.0) || !spread.is_finite() {
        return Err(Error::DegenerateSpread);
    }
    Ok(spread * (n as f64).powf(-1.0 / 3.0))
}

pub fn evaluation_grid(centers: &[f64], h: f64) -> Vec<f64> {
    let (min, max) = centers
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let mut grid = Vec::with_capacity(3 * centers.len() + GRID_POINTS);
    for &c in centers {
        grid.extend([c - h, c, c + h]);
    }
    let (a, b) = (min - 3.0 * h, max + 3.0 * h);
    let step = (b - a) / (GRID_POINTS - 1) as f64;
    grid.extend((0..GRID_POINTS).map(|i| a + step * i as f64));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// `(z, F(z))` rows for plotting over `[min - 3h, max + 3h]`.
pub fn grid_table(cdf: &SmoothCdf, points: usize, exec: Execution) -> Vec<(f64, f64)> {
    let c = cdf.centers();
    let (a, b) = (c[0] - 3.0 * cdf.h, c[c.len() - 1] + 3.0 * cdf.h);
    let step = (b - a) / (points.max(2) - 1) as f64;
    let zs: Vec<f64> = (0..points.max(2)).map(|i| a + step * i as f64).collect();
    let fs = cdf.eval_many(&zs, exec);
    zs.into_iter().zip(fs).collect()
}
