//! Continuous full-support pointer distributions and half-line regions.

use core::f64::consts::{FRAC_1_PI, PI, SQRT_2};
use core::fmt;
use core::str::FromStr;

use libm::{atan, erfc, exp, expm1, log, log1p, sqrt, tan};

use crate::error::{Error, Result};
use crate::stream::RandomStream;

/// A pointer distribution. Construct through the checked constructors so that
/// scale parameters are positive and finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointerDistribution {
    Normal {
        mu: f64,
        sigma: f64,
    },
    Cauchy {
        x0: f64,
        gamma: f64,
    },
    Logistic {
        mu: f64,
        s: f64,
    },
    /// Supported on the positive half-line only.
    Exponential {
        rate: f64,
    },
}

impl Default for PointerDistribution {
    fn default() -> Self {
        PointerDistribution::Cauchy {
            x0: 0.0,
            gamma: 1.0,
        }
    }
}

fn check_location(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameters("location must be finite"))
    }
}

fn check_scale(v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameters(
            "scale must be positive and finite",
        ))
    }
}

impl PointerDistribution {
    pub fn normal(mu: f64, sigma: f64) -> Result<Self> {
        Ok(Self::Normal {
            mu: check_location(mu)?,
            sigma: check_scale(sigma)?,
        })
    }

    pub fn cauchy(x0: f64, gamma: f64) -> Result<Self> {
        Ok(Self::Cauchy {
            x0: check_location(x0)?,
            gamma: check_scale(gamma)?,
        })
    }

    pub fn logistic(mu: f64, s: f64) -> Result<Self> {
        Ok(Self::Logistic {
            mu: check_location(mu)?,
            s: check_scale(s)?,
        })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Ok(Self::Exponential {
            rate: check_scale(rate)?,
        })
    }

    /// Re-checks parameters; useful for values built with the enum literal.
    pub fn validated(self) -> Result<Self> {
        match self {
            Self::Normal { mu, sigma } => Self::normal(mu, sigma),
            Self::Cauchy { x0, gamma } => Self::cauchy(x0, gamma),
            Self::Logistic { mu, s } => Self::logistic(mu, s),
            Self::Exponential { rate } => Self::exponential(rate),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Normal { mu, sigma } => 0.5 * erfc(-(x - mu) / (sigma * SQRT_2)),
            Self::Cauchy { x0, gamma } => cauchy_upper(-(x - x0) / gamma),
            Self::Logistic { mu, s } => 1.0 / (1.0 + exp(-(x - mu) / s)),
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -expm1(-rate * x)
                }
            }
        }
    }

    /// Survival function `1 - F(x)`, evaluated without cancellation in the upper tail.
    pub fn sf(&self, x: f64) -> f64 {
        match *self {
            Self::Normal { mu, sigma } => 0.5 * erfc((x - mu) / (sigma * SQRT_2)),
            Self::Cauchy { x0, gamma } => cauchy_upper((x - x0) / gamma),
            Self::Logistic { mu, s } => 1.0 / (1.0 + exp((x - mu) / s)),
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    exp(-rate * x)
                }
            }
        }
    }

    /// Inverse CDF on `(0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            Self::Normal { mu, sigma } => mu + sigma * standard_normal_quantile(u),
            Self::Cauchy { x0, gamma } => {
                // tan(pi (u - 1/2)) written as a cotangent to keep tail precision.
                let z = if u < 0.5 {
                    -1.0 / tan(PI * u)
                } else {
                    1.0 / tan(PI * (1.0 - u))
                };
                x0 + gamma * z
            }
            Self::Logistic { mu, s } => mu + s * log(u / (1.0 - u)),
            Self::Exponential { rate } => -log1p(-u) / rate,
        }
    }

    /// One draw by inverse-transform sampling.
    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        self.quantile(stream.uniform_open())
    }

    pub fn region_probability(&self, region: HalfLineRegion) -> f64 {
        match region.direction {
            Direction::Below => self.cdf(region.threshold),
            Direction::Above => self.sf(region.threshold),
        }
    }
}

/// `P(Z > z)` for a standard Cauchy `Z`, using `atan(1/z)` in the upper tail.
fn cauchy_upper(z: f64) -> f64 {
    if z > 1.0 {
        FRAC_1_PI * atan(1.0 / z)
    } else {
        0.5 - FRAC_1_PI * atan(z)
    }
}

/// Standard normal quantile: Acklam's rational approximation followed by one
/// Halley step against `erfc`.
fn standard_normal_quantile(u: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.38357751867269e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996,
        3.754408661907416,
    ];
    const P_LOW: f64 = 0.02425;

    if u <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if u >= 1.0 {
        return f64::INFINITY;
    }
    let x = if u < P_LOW {
        let q = sqrt(-2.0 * log(u));
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if u <= 1.0 - P_LOW {
        let q = u - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = sqrt(-2.0 * log1p(-u));
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let e = 0.5 * erfc(-x / SQRT_2) - u;
    let step = e * sqrt(2.0 * PI) * exp(x * x / 2.0);
    x - step / (1.0 + x * step / 2.0)
}

impl fmt::Display for PointerDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Normal { mu, sigma } => write!(f, "normal:{mu},{sigma}"),
            Self::Cauchy { x0, gamma } => write!(f, "cauchy:{x0},{gamma}"),
            Self::Logistic { mu, s } => write!(f, "logistic:{mu},{s}"),
            Self::Exponential { rate } => write!(f, "exponential:{rate}"),
        }
    }
}

fn parse_params<const N: usize>(args: &str) -> Result<[f64; N]> {
    let mut out = [0.0; N];
    let mut parts = args.split(',');
    for slot in out.iter_mut() {
        let part = parts
            .next()
            .ok_or(Error::InvalidDistributionSpec("too few parameters"))?;
        *slot = part
            .trim()
            .parse()
            .map_err(|_| Error::InvalidDistributionSpec("parameter is not a number"))?;
    }
    if parts.next().is_some() {
        return Err(Error::InvalidDistributionSpec("too many parameters"));
    }
    Ok(out)
}

impl FromStr for PointerDistribution {
    type Err = Error;

    /// Parses `normal:mu,sigma`, `cauchy:x0,gamma`, `logistic:mu,s` or `exponential:rate`.
    fn from_str(spec: &str) -> Result<Self> {
        let (family, args) = spec
            .split_once(':')
            .ok_or(Error::InvalidDistributionSpec("expected family:params"))?;
        match family.trim() {
            "normal" => {
                let [mu, sigma] = parse_params(args)?;
                Self::normal(mu, sigma)
            }
            "cauchy" => {
                let [x0, gamma] = parse_params(args)?;
                Self::cauchy(x0, gamma)
            }
            "logistic" => {
                let [mu, s] = parse_params(args)?;
                Self::logistic(mu, s)
            }
            "exponential" => {
                let [rate] = parse_params(args)?;
                Self::exponential(rate)
            }
            _ => Err(Error::InvalidDistributionSpec("unknown family")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Below,
    Above,
}

/// `{x <= threshold}` or `{x > threshold}`. A pointer exactly at the threshold
/// counts as below.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfLineRegion {
    threshold: f64,
    direction: Direction,
}

impl HalfLineRegion {
    pub fn new(threshold: f64, direction: Direction) -> Result<Self> {
        if !threshold.is_finite() {
            return Err(Error::InvalidParameters("threshold must be finite"));
        }
        Ok(Self {
            threshold,
            direction,
        })
    }

    pub fn below(threshold: f64) -> Result<Self> {
        Self::new(threshold, Direction::Below)
    }

    pub fn above(threshold: f64) -> Result<Self> {
        Self::new(threshold, Direction::Above)
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn contains(&self, x: f64) -> bool {
        match self.direction {
            Direction::Below => x <= self.threshold,
            Direction::Above => x > self.threshold,
        }
    }
}

/// Distribution for preparation-stage parameters (coin positions, masses, lock
/// times). Unlike a pointer it may have bounded support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParameterDistribution {
    Uniform { low: f64, high: f64 },
    Pointer(PointerDistribution),
}

impl Default for ParameterDistribution {
    fn default() -> Self {
        ParameterDistribution::Uniform {
            low: 0.0,
            high: 1.0,
        }
    }
}

impl ParameterDistribution {
    pub fn uniform(low: f64, high: f64) -> Result<Self> {
        if low.is_finite() && high.is_finite() && low < high {
            Ok(Self::Uniform { low, high })
        } else {
            Err(Error::InvalidParameters(
                "uniform requires finite low < high",
            ))
        }
    }

    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        match self {
            Self::Uniform { low, high } => low + (high - low) * stream.uniform_open(),
            Self::Pointer(d) => d.sample(stream),
        }
    }
}

impl fmt::Display for ParameterDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform { low, high } => write!(f, "uniform:{low},{high}"),
            Self::Pointer(d) => d.fmt(f),
        }
    }
}

impl FromStr for ParameterDistribution {
    type Err = Error;

    /// Accepts `uniform:low,high` in addition to every pointer family.
    fn from_str(spec: &str) -> Result<Self> {
        match spec.split_once(':') {
            Some((family, args)) if family.trim() == "uniform" => {
                let [low, high] = parse_params(args)?;
                Self::uniform(low, high)
            }
            _ => spec.parse().map(Self::Pointer),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use core::f64::consts::LN_2;

    #[test]
    fn cdf_examples() {
        assert_eq!(PointerDistribution::normal(0.0, 1.0).unwrap().cdf(0.0), 0.5);
        assert!((PointerDistribution::cauchy(0.0, 1.0).unwrap().cdf(1.0) - 0.75).abs() < 1e-15);
        assert!((PointerDistribution::exponential(1.0).unwrap().cdf(LN_2) - 0.5).abs() < 1e-15);
        assert_eq!(
            PointerDistribution::logistic(2.0, 3.0).unwrap().cdf(2.0),
            0.5
        );
    }

    #[test]
    fn region_examples() {
        let n = PointerDistribution::normal(0.0, 1.0).unwrap();
        assert_eq!(
            n.region_probability(HalfLineRegion::below(0.0).unwrap()),
            0.5
        );
        let c = PointerDistribution::cauchy(0.0, 1.0).unwrap();
        let above = c.region_probability(HalfLineRegion::above(1.0).unwrap());
        assert!((above - 0.25).abs() < 1e-15);
    }

    #[test]
    fn tie_goes_below() {
        let r = HalfLineRegion::below(1.5).unwrap();
        assert!(r.contains(1.5));
        assert!(!HalfLineRegion::above(1.5).unwrap().contains(1.5));
        assert!(HalfLineRegion::below(f64::INFINITY).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(PointerDistribution::normal(0.0, 0.0).is_err());
        assert!(PointerDistribution::cauchy(0.0, -1.0).is_err());
        assert!(PointerDistribution::exponential(f64::NAN).is_err());
        assert!(PointerDistribution::logistic(f64::INFINITY, 1.0).is_err());
        assert!(ParameterDistribution::uniform(1.0, 1.0).is_err());
    }

    #[test]
    fn spec_strings() {
        let d: PointerDistribution = "normal:0.5,2".parse().unwrap();
        assert_eq!(
            d,
            PointerDistribution::Normal {
                mu: 0.5,
                sigma: 2.0
            }
        );
        assert_eq!(
            "cauchy:0,1".parse::<PointerDistribution>().unwrap(),
            PointerDistribution::default()
        );
        assert_eq!(
            "exponential:3".parse::<PointerDistribution>().unwrap(),
            PointerDistribution::Exponential { rate: 3.0 }
        );
        assert!("exponential:3,4".parse::<PointerDistribution>().is_err());
        assert!("normal:1".parse::<PointerDistribution>().is_err());
        assert!("gamma:1,2".parse::<PointerDistribution>().is_err());
        assert!("normal:0,-1".parse::<PointerDistribution>().is_err());
        assert!("uniform:0,1".parse::<PointerDistribution>().is_err());
        for s in [
            "normal:0.5,2",
            "cauchy:-1,0.25",
            "logistic:3,1.5",
            "exponential:0.1",
        ] {
            let d: PointerDistribution = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        let p: ParameterDistribution = "uniform:0,1".parse().unwrap();
        assert_eq!(p, ParameterDistribution::default());
        assert_eq!(p.to_string(), "uniform:0,1");
        let p: ParameterDistribution = "logistic:0,1".parse().unwrap();
        assert!(matches!(p, ParameterDistribution::Pointer(_)));
    }

    #[test]
    fn quantile_inverts_cdf() {
        let dists = [
            PointerDistribution::normal(1.0, 2.0).unwrap(),
            PointerDistribution::cauchy(-1.0, 0.5).unwrap(),
            PointerDistribution::logistic(0.0, 3.0).unwrap(),
            PointerDistribution::exponential(2.0).unwrap(),
        ];
        for d in dists {
            for i in 1..1000 {
                let u = i as f64 / 1000.0;
                assert!((d.cdf(d.quantile(u)) - u).abs() < 1e-13, "{d} at {u}");
            }
            for u in [1e-10, 1e-5, 1.0 - 1e-5] {
                let x = d.quantile(u);
                assert!((d.cdf(x) - u).abs() / u.min(1.0 - u) < 1e-8, "{d} at {u}");
            }
        }
    }

    #[test]
    fn deterministic_samples() {
        let d = PointerDistribution::default();
        let a = d.sample(&mut RandomStream::new(9));
        let b = d.sample(&mut RandomStream::new(9));
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn exponential_support() {
        let d = PointerDistribution::exponential(1.0).unwrap();
        let mut s = RandomStream::new(11);
        assert!((0..100_000).all(|_| d.sample(&mut s) > 0.0));
        assert_eq!(d.cdf(-1.0), 0.0);
        assert_eq!(d.sf(0.0), 1.0);
    }
}
