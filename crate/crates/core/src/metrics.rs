//! Sup-norm and integrated squared distances between distribution functions.

use crate::exec::Execution;
use crate::kcdf::{SmoothCdf, StepCdf};
use crate::rng::ErrorLaw;
use crate::{Error, Result};

/// An evaluable distribution function.
pub trait Cdf {
    fn eval(&self, z: f64) -> f64;

    /// `F(z-)`. Equal to `eval` for continuous functions.
    fn left_limit(&self, z: f64) -> f64 {
        self.eval(z)
    }

    /// Jump locations of a step function, sorted.
    fn jumps(&self) -> Option<&[f64]> {
        None
    }
}

impl<T: Cdf + ?Sized> Cdf for &T {
    fn eval(&self, z: f64) -> f64 {
        (**self).eval(z)
    }
    fn left_limit(&self, z: f64) -> f64 {
        (**self).left_limit(z)
    }
    fn jumps(&self) -> Option<&[f64]> {
        (**self).jumps()
    }
}

impl Cdf for SmoothCdf {
    fn eval(&self, z: f64) -> f64 {
        SmoothCdf::eval(self, z)
    }
}

impl Cdf for StepCdf {
    fn eval(&self, z: f64) -> f64 {
        StepCdf::eval(self, z)
    }
    fn left_limit(&self, z: f64) -> f64 {
        StepCdf::left_limit(self, z)
    }
    fn jumps(&self) -> Option<&[f64]> {
        Some(self.points())
    }
}

/// Wraps a continuous closure.
#[derive(Clone, Copy, Debug)]
pub struct FnCdf<F>(pub F);

impl<F: Fn(f64) -> f64> Cdf for FnCdf<F> {
    fn eval(&self, z: f64) -> f64 {
        (self.0)(z)
    }
}

/// The exact cdf of an innovation law, checked once at construction.
#[derive(Clone, Debug)]
pub struct LawCdf<'a>(&'a ErrorLaw);

impl<'a> LawCdf<'a> {
    pub fn new(law: &'a ErrorLaw) -> Result<Self> {
        law.cdf(0.0)?;
        Ok(Self(law))
    }
}

impl Cdf for LawCdf<'_> {
    fn eval(&self, z: f64) -> f64 {
        self.0.cdf(z).expect("law cdf checked at construction")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeviationReport {
    pub d_sup: f64,
    pub argmax_z: f64,
    pub ise: f64,
}

/// `grid` plus every jump point of either argument, sorted and deduplicated.
pub fn augmented_grid<A: Cdf + ?Sized, B: Cdf + ?Sized>(f1: &A, f2: &B, grid: &[f64]) -> Vec<f64> {
    let mut all = grid.to_vec();
    for j in [f1.jumps(), f2.jumps()].into_iter().flatten() {
        all.extend_from_slice(j);
    }
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

fn gap_at<A: Cdf + ?Sized, B: Cdf + ?Sized>(f1: &A, f2: &B, z: f64, at_jump: bool) -> f64 {
    let right = (f1.eval(z) - f2.eval(z)).abs();
    if at_jump {
        right.max((f1.left_limit(z) - f2.left_limit(z)).abs())
    } else {
        right
    }
}

fn is_jump<A: Cdf + ?Sized>(f: &A, z: f64) -> bool {
    f.jumps().is_some_and(|j| j.binary_search_by(|v| v.total_cmp(&z)).is_ok())
}

/// `max_z |f1(z) - f2(z)|` over `grid`, including left limits at the jumps of
/// step-function arguments. Returns the first maximizing point.
pub fn sup_distance<A: Cdf + ?Sized, B: Cdf + ?Sized>(f1: &A, f2: &B, grid: &[f64]) -> (f64, f64) {
    let has_jumps = f1.jumps().is_some() || f2.jumps().is_some();
    let owned;
    let zs = if has_jumps {
        owned = augmented_grid(f1, f2, grid);
        &owned[..]
    } else {
        grid
    };
    let mut best = (0.0, zs.first().copied().unwrap_or(f64::NAN));
    for &z in zs {
        let jump = has_jumps && (is_jump(f1, z) || is_jump(f2, z));
        let d = gap_at(f1, f2, z, jump);
        if d > best.0 {
            best = (d, z);
        }
    }
    best
}

/// [`sup_distance`] with the grid evaluations spread over `exec`.
pub fn sup_distance_with<A, B>(f1: &A, f2: &B, grid: &[f64], exec: Execution) -> (f64, f64)
where
    A: Cdf + Sync + ?Sized,
    B: Cdf + Sync + ?Sized,
{
    let has_jumps = f1.jumps().is_some() || f2.jumps().is_some();
    let zs = if has_jumps { augmented_grid(f1, f2, grid) } else { grid.to_vec() };
    let gaps = exec.map_slice(&zs, |&z| {
        let jump = has_jumps && (is_jump(f1, z) || is_jump(f2, z));
        gap_at(f1, f2, z, jump)
    });
    let mut best = (0.0, zs.first().copied().unwrap_or(f64::NAN));
    for (d, z) in gaps.into_iter().zip(zs) {
        if d > best.0 {
            best = (d, z);
        }
    }
    best
}

/// Neumaier-compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

pub const MIN_PANELS: usize = 64;

/// Composite Simpson approximation of `∫_lo^hi (f1 - f2)²`. An odd panel
/// count is rounded up.
pub fn ise<A: Cdf + ?Sized, B: Cdf + ?Sized>(f1: &A, f2: &B, lo: f64, hi: f64, panels: usize) -> Result<f64> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("integration range [{lo}, {hi}] is empty")));
    }
    if panels < MIN_PANELS {
        return Err(Error::InvalidArgument(format!("need at least {MIN_PANELS} panels, got {panels}")));
    }
    let m = panels + panels % 2;
    let step = (hi - lo) / m as f64;
    let sq = |z: f64| {
        let d = f1.eval(z) - f2.eval(z);
        d * d
    };
    let mut acc = CompensatedSum::default();
    acc.add(sq(lo));
    acc.add(sq(hi));
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(w * sq(lo + step * i as f64));
    }
    Ok(acc.total() * step / 3.0)
}

/// Integration range `[mean - 8 sd, mean + 8 sd]` of a sample.
pub fn ise_range(sample: &[f64]) -> (f64, f64) {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let var = sample.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let sd = var.sqrt();
    (mean - 8.0 * sd, mean + 8.0 * sd)
}

pub fn deviation<A: Cdf + ?Sized, B: Cdf + ?Sized>(
    f1: &A,
    f2: &B,
    grid: &[f64],
    range: (f64, f64),
    panels: usize,
) -> Result<DeviationReport> {
    let (d_sup, argmax_z) = sup_distance(f1, f2, grid);
    let ise = ise(f1, f2, range.0, range.1, panels)?;
    Ok(DeviationReport { d_sup, argmax_z, ise })
}
