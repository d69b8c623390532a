use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use libm::{erfc, exp, lgamma, log, log1p, sqrt};

use super::SimResult;
use crate::error::{Error, Result};
use crate::pointer::PointerDistribution;

/// Upper 0.5% point of the standard normal (two-sided 99%).
pub const Z_99: f64 = 2.575_829_303_548_900_4;

/// Largest `n` for which binomial tails are summed exactly; above it the normal
/// approximation with continuity correction is used.
pub const EXACT_TEST_MAX_N: u64 = 100_000;

pub const SIGNIFICANCE_LEVELS: [f64; 3] = [0.05, 0.01, 0.001];

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// Wilson score interval for `hits` out of `n` at critical value `z`.
/// The interval always contains `hits / n`.
pub fn wilson_interval(hits: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let phat = hits as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (phat + z2 / (2.0 * n_f)) / denom;
    let half = z / denom * sqrt(phat * (1.0 - phat) / n_f + z2 / (4.0 * n_f * n_f));
    (
        (center - half).max(0.0).min(phat),
        (center + half).min(1.0).max(phat),
    )
}

fn ln_pmf(n: u64, k: u64, p: f64) -> f64 {
    let (n_f, k_f) = (n as f64, k as f64);
    let ln_choose = lgamma(n_f + 1.0) - lgamma(k_f + 1.0) - lgamma(n_f - k_f + 1.0);
    ln_choose + k_f * log(p) + (n_f - k_f) * log1p(-p)
}

/// `P(X >= k)` for `X ~ Binomial(n, p)` by exact summation. Terms are summed
/// away from the mode so that every recurrence step shrinks.
pub fn binomial_upper_tail(n: u64, k: u64, p: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let odds = p / (1.0 - p);
    let mode = libm::floor((n + 1) as f64 * p) as u64;
    if k > mode {
        let mut term = exp(ln_pmf(n, k, p));
        let mut sum = 0.0;
        for i in k..=n {
            sum += term;
            term *= (n - i) as f64 / (i + 1) as f64 * odds;
            if term <= sum * 1e-17 {
                break;
            }
        }
        sum.min(1.0)
    } else {
        let mut term = exp(ln_pmf(n, k - 1, p));
        let mut lower = 0.0;
        for i in (0..k).rev() {
            lower += term;
            term *= i as f64 / (n - i + 1) as f64 / odds;
            if term <= lower * 1e-17 {
                break;
            }
        }
        (1.0 - lower).clamp(0.0, 1.0)
    }
}

/// `P(X <= k)`.
fn binomial_lower_tail(n: u64, k: u64, p: f64) -> f64 {
    binomial_upper_tail(n, n - k, 1.0 - p)
}

fn upper_tail(n: u64, k: u64, p: f64) -> f64 {
    if n <= EXACT_TEST_MAX_N {
        binomial_upper_tail(n, k, p)
    } else {
        let sd = sqrt(n as f64 * p * (1.0 - p));
        0.5 * erfc((k as f64 - 0.5 - n as f64 * p) / sd / SQRT_2)
    }
}

fn lower_tail(n: u64, k: u64, p: f64) -> f64 {
    if n <= EXACT_TEST_MAX_N {
        binomial_lower_tail(n, k, p)
    } else {
        let sd = sqrt(n as f64 * p * (1.0 - p));
        normal_cdf((k as f64 + 0.5 - n as f64 * p) / sd)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    Greater,
    TwoSided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rejection {
    pub alpha: f64,
    pub reject: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestVerdict {
    pub null_value: f64,
    pub alternative: Alternative,
    pub p_value: f64,
    pub reject_at: [Rejection; 3],
}

impl TestVerdict {
    fn new(null_value: f64, alternative: Alternative, p_value: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        TestVerdict {
            null_value,
            alternative,
            p_value,
            reject_at: SIGNIFICANCE_LEVELS.map(|alpha| Rejection {
                alpha,
                reject: p_value <= alpha,
            }),
        }
    }

    /// Whether the null is rejected at `alpha` (any level, not only the tabulated ones).
    pub fn rejects(&self, alpha: f64) -> bool {
        self.p_value <= alpha
    }
}

fn check_null(p0: f64) -> Result<()> {
    if p0 > 0.0 && p0 < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidNull(p0))
    }
}

/// One-sided test of `rate = p0` against `rate > p0` on the hit count.
pub fn binomial_test_greater(result: &SimResult, p0: f64) -> Result<TestVerdict> {
    check_null(p0)?;
    Ok(TestVerdict::new(
        p0,
        Alternative::Greater,
        upper_tail(result.n, result.hits, p0),
    ))
}

/// Two-sided test of `rate = p0` for `successes` out of `n`, doubling the smaller tail.
pub fn binomial_test_two_sided(successes: u64, n: u64, p0: f64) -> Result<TestVerdict> {
    check_null(p0)?;
    let smaller = upper_tail(n, successes, p0).min(lower_tail(n, successes, p0));
    Ok(TestVerdict::new(p0, Alternative::TwoSided, 2.0 * smaller))
}

/// Kolmogorov–Smirnov distance between the empirical CDF of `samples` and `dist`.
pub fn ks_distance(samples: &[f64], dist: &PointerDistribution) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = dist.cdf(x);
            (((i + 1) as f64 / n) - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::{SimulationPlan, Tally};
    use crate::stream::RandomStream;

    fn result(hits: u64, n: u64) -> SimResult {
        let plan = SimulationPlan::new(n, 0, n).unwrap();
        plan.finish(Tally {
            n,
            hits,
            ..Tally::default()
        })
    }

    fn choose(n: u64, k: u64) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    /// Direct summation of C(n, i) p^i (1-p)^(n-i).
    fn naive_upper(n: u64, k: u64, p: f64) -> f64 {
        (k..=n)
            .map(|i| choose(n, i) * libm::pow(p, i as f64) * libm::pow(1.0 - p, (n - i) as f64))
            .sum()
    }

    #[test]
    fn exact_tail_matches_direct_sum() {
        // 60460 / 2^20
        assert!((binomial_upper_tail(20, 14, 0.5) - 60460.0 / 1048576.0).abs() < 1e-15);
        for (n, p) in [(30, 0.3), (45, 0.56), (60, 0.9)] {
            for k in 0..=n {
                let a = binomial_upper_tail(n, k, p);
                let b = naive_upper(n, k, p);
                assert!((a - b).abs() < 1e-12, "n={n} k={k} p={p}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn all_hits_gives_power_of_null() {
        for (n, p0) in [(10, 0.5), (50, 0.56), (200, 0.3)] {
            let v = binomial_test_greater(&result(n, n), p0).unwrap();
            let expected = libm::pow(p0, n as f64);
            assert!(((v.p_value - expected) / expected).abs() < 1e-12);
        }
    }

    #[test]
    fn centred_null_is_about_half() {
        let v = binomial_test_greater(&result(500_000, 1_000_000), 0.5).unwrap();
        assert!((v.p_value - 0.5).abs() < 1e-3);
        let v = binomial_test_greater(&result(50_000, 100_000), 0.5).unwrap();
        assert!((v.p_value - 0.5).abs() < 2e-3);
        assert!(v.reject_at.iter().all(|r| !r.reject));
    }

    #[test]
    fn rejection_map_is_consistent() {
        let v = binomial_test_greater(&result(572_000, 1_000_000), 0.56).unwrap();
        assert!(v.p_value < 1e-100);
        for r in v.reject_at {
            assert_eq!(r.reject, v.p_value <= r.alpha);
        }
    }

    #[test]
    fn invalid_null() {
        assert_eq!(
            binomial_test_greater(&result(1, 2), 0.0),
            Err(Error::InvalidNull(0.0))
        );
        assert!(binomial_test_two_sided(1, 2, 1.0).is_err());
    }

    #[test]
    fn two_sided_symmetry() {
        let a = binomial_test_two_sided(40, 100, 0.5).unwrap().p_value;
        let b = binomial_test_two_sided(60, 100, 0.5).unwrap().p_value;
        assert!((a - b).abs() < 1e-14);
        // 2 * P(X >= 60), X ~ Bin(100, 1/2)
        assert!((b - 2.0 * naive_upper(100, 60, 0.5)).abs() < 1e-12);
        assert_eq!(binomial_test_two_sided(50, 100, 0.5).unwrap().p_value, 1.0);
    }

    #[test]
    fn wilson_known_values() {
        // statsmodels proportion_confint(50, 100, alpha=0.01, method="wilson")
        let (lo, hi) = wilson_interval(50, 100, Z_99);
        assert!((lo - 0.375_279_625_044_839_8).abs() < 1e-12, "{lo}");
        assert!((hi - 0.624_720_374_955_160_2).abs() < 1e-12, "{hi}");
        let (lo, hi) = wilson_interval(0, 10, Z_99);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 1.0);
        let (lo, hi) = wilson_interval(10, 10, Z_99);
        assert!(lo < 1.0);
        assert_eq!(hi, 1.0);
    }

    #[test]
    fn ks_examples() {
        let n = PointerDistribution::normal(0.0, 1.0).unwrap();
        assert_eq!(ks_distance(&[0.0], &n).unwrap(), 0.5);
        assert_eq!(ks_distance(&[], &n), Err(Error::EmptySample));
        let mut s = RandomStream::new(2);
        let samples: Vec<f64> = (0..10_000).map(|_| n.sample(&mut s)).collect();
        let shifted = PointerDistribution::normal(10.0, 1.0).unwrap();
        assert!(ks_distance(&samples, &shifted).unwrap() > 0.9);
    }
}
