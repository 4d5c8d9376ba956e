//! Seeded sampling and reference distribution functions for innovation laws.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result};

/// A seed plus a stream id. Each pair names an independent ChaCha stream, so
/// replications can be drawn in any order or on any thread.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngState {
    pub seed: u64,
    pub stream: u64,
}

impl RngState {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Derives a stream id from an ordered list of coordinates (model index,
    /// sample size, replication id, ...).
    pub fn substream(seed: u64, coords: &[u64]) -> Self {
        let mut h = 0x6a09_e667_f3bc_c909u64;
        for &c in coords {
            h = splitmix64(h ^ splitmix64(c));
        }
        Self { seed, stream: h }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

pub type CdfFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SamplerFn = Arc<dyn Fn(&mut dyn RngCore) -> f64 + Send + Sync>;

/// A user-supplied innovation law. Tail conditions are not checked.
#[derive(Clone)]
pub struct CustomLaw {
    pub name: String,
    pub cdf: Option<CdfFn>,
    pub sampler: SamplerFn,
}

impl fmt::Debug for CustomLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomLaw")
            .field("name", &self.name)
            .field("has_cdf", &self.cdf.is_some())
            .finish()
    }
}

#[derive(Clone, Debug)]
pub enum ErrorLaw {
    StandardNormal,
    /// Standard Laplace: `F(z) = e^z / 2` for `z < 0`, `1 - e^{-z} / 2` otherwise.
    StandardDoubleExponential,
    Custom(CustomLaw),
}

impl ErrorLaw {
    pub fn custom<S>(name: impl Into<String>, cdf: Option<CdfFn>, sampler: S) -> Self
    where
        S: Fn(&mut dyn RngCore) -> f64 + Send + Sync + 'static,
    {
        ErrorLaw::Custom(CustomLaw {
            name: name.into(),
            cdf,
            sampler: Arc::new(sampler),
        })
    }

    pub fn name(&self) -> &str {
        match self {
            ErrorLaw::StandardNormal => "normal",
            ErrorLaw::StandardDoubleExponential => "laplace",
            ErrorLaw::Custom(c) => &c.name,
        }
    }

    /// Parses the CLI / config spelling of a built-in law.
    pub fn from_name(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "normal" | "gaussian" => Ok(ErrorLaw::StandardNormal),
            "laplace" | "double-exponential" | "doubleexp" => {
                Ok(ErrorLaw::StandardDoubleExponential)
            }
            other => Err(Error::InvalidArgument(format!("unknown error law '{other}'"))),
        }
    }

    pub fn sample_one(&self, rng: &mut dyn RngCore) -> f64 {
        match self {
            ErrorLaw::StandardNormal => StandardNormal.sample(rng),
            ErrorLaw::StandardDoubleExponential => {
                let u = open_unit(rng);
                if u < 0.5 {
                    (2.0 * u).ln()
                } else {
                    -(2.0 * (1.0 - u)).ln()
                }
            }
            ErrorLaw::Custom(c) => (c.sampler)(rng),
        }
    }

    /// Exact cdf of the law. Custom laws without a cdf are an error.
    pub fn cdf(&self, z: f64) -> Result<f64> {
        match self {
            ErrorLaw::StandardNormal => Ok(normal_cdf(z)),
            ErrorLaw::StandardDoubleExponential => Ok(laplace_cdf(z)),
            ErrorLaw::Custom(c) => match &c.cdf {
                Some(f) => Ok(f(z)),
                None => Err(Error::MissingCdf(c.name.clone())),
            },
        }
    }

    /// Inverse cdf, closed form for the built-in laws and bisection otherwise.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidArgument(format!("probability {p} outside (0, 1)")));
        }
        match self {
            ErrorLaw::StandardNormal => Ok(normal_quantile(p)),
            ErrorLaw::StandardDoubleExponential => Ok(if p < 0.5 {
                (2.0 * p).ln()
            } else {
                -(2.0 * (1.0 - p)).ln()
            }),
            ErrorLaw::Custom(_) => {
                let (mut lo, mut hi) = (-1.0, 1.0);
                while self.cdf(lo)? > p {
                    lo *= 2.0;
                }
                while self.cdf(hi)? < p {
                    hi *= 2.0;
                }
                while hi - lo > 1e-12 * (1.0 + hi.abs().max(lo.abs())) {
                    let mid = 0.5 * (lo + hi);
                    if self.cdf(mid)? >= p {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                Ok(hi)
            }
        }
    }
}

/// Draws `n` i.i.d. values from `law` on the stream named by `state`.
pub fn sample_errors(law: &ErrorLaw, n: usize, state: RngState) -> Vec<f64> {
    let mut rng = state.rng();
    (0..n).map(|_| law.sample_one(&mut rng)).collect()
}

/// Closed-form cdf of a built-in law.
pub fn reference_cdf(law: &ErrorLaw, z: f64) -> Result<f64> {
    law.cdf(z)
}

fn open_unit(rng: &mut dyn RngCore) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Starts from statrs' inverse erfc and polishes with Newton steps on the
/// accurate cdf.
pub fn normal_quantile(p: f64) -> f64 {
    let mut q = -std::f64::consts::SQRT_2 * statrs::function::erf::erfc_inv(2.0 * p);
    for _ in 0..3 {
        let density = (-0.5 * q * q).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if density <= 0.0 {
            break;
        }
        q -= (normal_cdf(q) - p) / density;
    }
    q
}

pub fn laplace_cdf(z: f64) -> f64 {
    if z < 0.0 {
        0.5 * z.exp()
    } else {
        1.0 - 0.5 * (-z).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_var(x: &[f64]) -> (f64, f64) {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let v = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, v)
    }

    #[test]
    fn normal_moments() {
        let n = 1_000_000;
        let x = sample_errors(&ErrorLaw::StandardNormal, n, RngState::new(11, 0));
        let (m, v) = mean_var(&x);
        assert!(m.abs() < 4.0 / (n as f64).sqrt(), "mean {m}");
        assert!((v - 1.0).abs() < 0.01, "var {v}");
    }

    #[test]
    fn laplace_moments() {
        let n = 1_000_000;
        let x = sample_errors(&ErrorLaw::StandardDoubleExponential, n, RngState::new(12, 0));
        let (m, v) = mean_var(&x);
        assert!(m.abs() < 6.0 / (n as f64).sqrt(), "mean {m}");
        assert!((v - 2.0).abs() < 0.02, "var {v}");
    }

    #[test]
    fn deterministic_streams() {
        for law in [ErrorLaw::StandardNormal, ErrorLaw::StandardDoubleExponential] {
            let s = RngState::new(99, 3);
            let a = sample_errors(&law, 5, s);
            let b = sample_errors(&law, 5, s);
            assert_eq!(
                a.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                b.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
            assert_ne!(a, sample_errors(&law, 5, RngState::new(99, 4)));
        }
    }

    #[test]
    fn substreams_differ_by_coordinate() {
        let a = RngState::substream(1, &[0, 50, 7]);
        let b = RngState::substream(1, &[0, 50, 8]);
        let c = RngState::substream(1, &[1, 50, 7]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, RngState::substream(1, &[0, 50, 7]));
    }

    #[test]
    fn reference_values() {
        assert_eq!(reference_cdf(&ErrorLaw::StandardNormal, 0.0).unwrap(), 0.5);
        assert_eq!(reference_cdf(&ErrorLaw::StandardDoubleExponential, 0.0).unwrap(), 0.5);
        let v = reference_cdf(&ErrorLaw::StandardDoubleExponential, 2f64.ln()).unwrap();
        assert!((v - 0.75).abs() < 1e-15);
        // Phi(1.96) from tables
        assert!((normal_cdf(1.96) - 0.975_002_104_851_779_5).abs() < 1e-15);
        assert!((normal_cdf(-1.0) - 0.158_655_253_931_457_07).abs() < 1e-15);
        assert!((normal_cdf(-6.0) - 9.865_876_450_376_946e-10).abs() < 1e-22);
    }

    #[test]
    fn tails_and_monotonicity() {
        for law in [ErrorLaw::StandardNormal, ErrorLaw::StandardDoubleExponential] {
            assert!(law.cdf(-20.0).unwrap() < 1e-8);
            assert!(law.cdf(20.0).unwrap() > 1.0 - 1e-8);
            let mut prev = 0.0;
            for i in 0..=4000 {
                let z = -20.0 + 0.01 * i as f64;
                let v = law.cdf(z).unwrap();
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn quantiles_invert_cdf() {
        let custom = ErrorLaw::custom(
            "logistic",
            Some(Arc::new(|z: f64| 1.0 / (1.0 + (-z).exp()))),
            |rng: &mut dyn RngCore| {
                let u: f64 = rng.random();
                (u / (1.0 - u)).ln()
            },
        );
        for law in [ErrorLaw::StandardNormal, ErrorLaw::StandardDoubleExponential, custom] {
            for p in [0.001, 0.1, 0.5, 0.77, 0.999] {
                let q = law.quantile(p).unwrap();
                assert!((law.cdf(q).unwrap() - p).abs() < 1e-10, "{} {p}", law.name());
            }
        }
    }

    #[test]
    fn custom_without_cdf_is_an_error() {
        let law = ErrorLaw::custom("uniform", None, |rng: &mut dyn RngCore| rng.random::<f64>());
        assert!(matches!(law.cdf(0.3), Err(Error::MissingCdf(_))));
        let x = sample_errors(&law, 100, RngState::new(1, 1));
        assert!(x.iter().all(|v| (0.0..1.0).contains(v)));
    }
}
