//! Closed-form algebra of extended Bernoulli trials.
//!
//! A strategy assigns each first-stage outcome `k` the probability `y_k` that the
//! pointer lands in the predict-success region. The pointer is independent of the
//! first stage, so the prediction-success probability depends on the regions only
//! through `y_k`:
//!
//! ```text
//! PSP = Σ p_k s_k y_k + Σ p_k (1 - s_k)(1 - y_k) = Σ p_k (1 + 2 s_k y_k - s_k - y_k)
//! ```
//!
//! and `PSP > p` exactly when `Σ p_k (2 s_k + y_k - 2 s_k y_k) < 1`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::TOLERANCE;

/// One first-stage outcome: its probability and the conditional success probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub weight: f64,
    pub success_prob: f64,
}

/// Validated description of an extended Bernoulli trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSpec {
    outcomes: Vec<Outcome>,
}

impl TrialSpec {
    /// Validates `(weight, success_prob)` pairs. Weights must already sum to one
    /// within [`TOLERANCE`]; nothing is renormalized.
    pub fn new(raw: &[(f64, f64)]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyOutcomeList);
        }
        let mut sum = 0.0;
        for (index, &(weight, success_prob)) in raw.iter().enumerate() {
            if !weight.is_finite() || weight < 0.0 {
                return Err(Error::NegativeWeight {
                    index,
                    value: weight,
                });
            }
            if !(0.0..=1.0).contains(&success_prob) {
                return Err(Error::SuccessProbOutOfRange {
                    index,
                    value: success_prob,
                });
            }
            sum += weight;
        }
        if (sum - 1.0).abs() > TOLERANCE {
            return Err(Error::WeightsNotNormalized { sum });
        }
        Ok(Self {
            outcomes: raw
                .iter()
                .map(|&(weight, success_prob)| Outcome {
                    weight,
                    success_prob,
                })
                .collect(),
        })
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    /// Number of first-stage outcomes.
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Marginal success probability `p = Σ p_k s_k`.
    pub fn success_probability(&self) -> f64 {
        self.outcomes
            .iter()
            .map(|o| o.weight * o.success_prob)
            .sum()
    }

    /// The same trial with success and failure relabelled (`s_k -> 1 - s_k`).
    pub fn relabelled(&self) -> Self {
        Self {
            outcomes: self
                .outcomes
                .iter()
                .map(|o| Outcome {
                    weight: o.weight,
                    success_prob: 1.0 - o.success_prob,
                })
                .collect(),
        }
    }
}

/// Alias of [`TrialSpec::new`].
pub fn validate_trial(raw: &[(f64, f64)]) -> Result<TrialSpec> {
    TrialSpec::new(raw)
}

/// Per-outcome probabilities `y_k` of predicting success.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    y: Vec<f64>,
}

impl Strategy {
    pub fn new(y: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = y
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(Error::StrategyOutOfRange { index, value });
        }
        Ok(Self { y })
    }

    /// The same `y` for each of `n` outcomes.
    pub fn uniform(y: f64, n: usize) -> Result<Self> {
        Self::new(alloc::vec![y; n])
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// True when every `y_k` equals the first within [`TOLERANCE`].
    pub fn is_uniform(&self) -> bool {
        match self.y.first() {
            Some(&first) => self.y.iter().all(|&v| (v - first).abs() <= TOLERANCE),
            None => true,
        }
    }
}

fn paired<'a>(
    trial: &'a TrialSpec,
    strat: &'a Strategy,
) -> Result<impl Iterator<Item = (&'a Outcome, f64)> + 'a> {
    if trial.len() != strat.len() {
        return Err(Error::LengthMismatch {
            trial: trial.len(),
            strategy: strat.len(),
        });
    }
    Ok(trial.outcomes.iter().zip(strat.y.iter().copied()))
}

/// PSP via the collapsed form `Σ p_k (1 + 2 s_k y_k - s_k - y_k)`.
pub fn analytic_psp(trial: &TrialSpec, strat: &Strategy) -> Result<f64> {
    let psp: f64 = paired(trial, strat)?
        .map(|(o, y)| {
            let s = o.success_prob;
            o.weight * (1.0 + 2.0 * s * y - s - y)
        })
        .sum();
    Ok(psp.clamp(0.0, 1.0))
}

/// PSP via the two-sum form `Σ p_k s_k y_k + Σ p_k (1 - s_k)(1 - y_k)`.
pub fn two_sum_psp(trial: &TrialSpec, strat: &Strategy) -> Result<f64> {
    let (hit_success, hit_failure) = paired(trial, strat)?.fold((0.0, 0.0), |(a, b), (o, y)| {
        (
            a + o.weight * o.success_prob * y,
            b + o.weight * (1.0 - o.success_prob) * (1.0 - y),
        )
    });
    Ok(hit_success + hit_failure)
}

/// Left side of the edge criterion, `Σ p_k (2 s_k + y_k - 2 s_k y_k)`.
///
/// `PSP > p` if and only if the returned value is below one.
pub fn edge_condition(trial: &TrialSpec, strat: &Strategy) -> Result<f64> {
    Ok(paired(trial, strat)?
        .map(|(o, y)| {
            let s = o.success_prob;
            o.weight * (2.0 * s + y - 2.0 * s * y)
        })
        .sum())
}

/// Predict failure exactly on outcomes with `s_k < 1/2`, success otherwise
/// (ties go to success). Returns the strategy and its PSP, which equals
/// `p + Σ_{s_k < 1/2} p_k (1 - 2 s_k)`.
pub fn optimal_strategy(trial: &TrialSpec) -> (Strategy, f64) {
    let y = trial
        .outcomes
        .iter()
        .map(|o| if o.success_prob < 0.5 { 0.0 } else { 1.0 })
        .collect();
    (Strategy { y }, trial.success_probability() + premium(trial))
}

/// Maximum premium over chance, `Σ_{s_k < 1/2} p_k (1 - 2 s_k)`.
pub fn premium(trial: &TrialSpec) -> f64 {
    trial
        .outcomes
        .iter()
        .filter(|o| o.success_prob < 0.5)
        .map(|o| o.weight * (1.0 - 2.0 * o.success_prob))
        .sum()
}

/// Everything the closed form says about one (trial, strategy) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisReport {
    pub p: f64,
    pub psp: f64,
    pub edge: f64,
    pub beats_chance: bool,
    pub premium_bound: f64,
}

pub fn analyze(trial: &TrialSpec, strat: &Strategy) -> Result<AnalysisReport> {
    let p = trial.success_probability();
    let psp = analytic_psp(trial, strat)?;
    let edge = edge_condition(trial, strat)?;
    let (_, max_psp) = optimal_strategy(trial);
    Ok(AnalysisReport {
        p,
        psp,
        edge,
        beats_chance: psp > p,
        premium_bound: (max_psp - p).max(0.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Theorem1Verdict {
    pub applicable: bool,
    pub holds: bool,
}

/// With `p >= 1/2`, a single outcome or a uniform strategy cannot beat chance.
///
/// `applicable` requires `p >= 1/2` (the standing assumption on which success is
/// the more likely label) together with `N = 1` or all `y_k` equal.
pub fn check_theorem1(trial: &TrialSpec, strat: &Strategy) -> Result<Theorem1Verdict> {
    let psp = analytic_psp(trial, strat)?;
    let p = trial.success_probability();
    let applicable = p >= 0.5 && (trial.len() == 1 || strat.is_uniform());
    Ok(Theorem1Verdict {
        applicable,
        holds: psp <= p + TOLERANCE,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Theorem2Verdict {
    pub hypotheses_met: bool,
    pub conclusion_holds: bool,
}

/// For `N = 2`, `s_1 < 1/2 < s_2`, `p >= 1/2` and `PSP > p` force `y_2 > y_1`.
pub fn check_theorem2(trial: &TrialSpec, strat: &Strategy) -> Result<Theorem2Verdict> {
    let [first, second] = two_outcomes(trial)?;
    let psp = analytic_psp(trial, strat)?;
    let p = trial.success_probability();
    let hypotheses_met =
        first.success_prob < 0.5 && 0.5 < second.success_prob && p >= 0.5 && psp > p;
    Ok(Theorem2Verdict {
        hypotheses_met,
        conclusion_holds: strat.y[1] > strat.y[0],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SufficiencyVerdict {
    /// `y_1 < y_2`.
    pub antecedent: bool,
    /// `PSP > p`.
    pub consequent: bool,
    pub holds: bool,
}

/// For `N = 2`, `s_1 < 1/2 < s_2` and `p = 1/2`, `y_1 < y_2` implies `PSP > p`.
pub fn check_p_half_sufficiency(trial: &TrialSpec, strat: &Strategy) -> Result<SufficiencyVerdict> {
    let [first, second] = two_outcomes(trial)?;
    if !(first.success_prob < 0.5 && 0.5 < second.success_prob) {
        return Err(Error::PreconditionViolated("requires s_1 < 0.5 < s_2"));
    }
    let p = trial.success_probability();
    if (p - 0.5).abs() > TOLERANCE {
        return Err(Error::PreconditionViolated("requires p = 0.5"));
    }
    let psp = analytic_psp(trial, strat)?;
    let antecedent = strat.y[0] < strat.y[1];
    let consequent = psp > p;
    Ok(SufficiencyVerdict {
        antecedent,
        consequent,
        holds: !antecedent || consequent,
    })
}

fn two_outcomes(trial: &TrialSpec) -> Result<[Outcome; 2]> {
    match trial.outcomes() {
        [a, b] => Ok([*a, *b]),
        other => Err(Error::WrongArity {
            expected: 2,
            actual: other.len(),
        }),
    }
}
