//! Seeded random instances and the property suites built on them.
//!
//! Weights are uniform draws normalized to sum to one; success probabilities
//! and strategy entries are uniform on `[0, 1]` unless a suite needs them
//! constrained. Every suite reads its own substream of the seed.

use alloc::vec::Vec;

use crate::montecarlo::brute_force_psp;
use crate::stream::RandomStream;
use crate::trial::{
    analytic_psp, check_p_half_sufficiency, check_theorem1, check_theorem2, edge_condition,
    two_sum_psp, Strategy, TrialSpec,
};
use crate::TOLERANCE;

pub const MAX_OUTCOMES: usize = 8;

/// Tolerance between the brute-force oracle and the closed form.
pub const ORACLE_TOLERANCE: f64 = 1e-14;

fn weights(stream: &mut RandomStream, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| stream.uniform_open()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// A trial with `n` outcomes.
pub fn random_trial(stream: &mut RandomStream, n: usize) -> TrialSpec {
    let w = weights(stream, n);
    let pairs: Vec<(f64, f64)> = w.into_iter().map(|w| (w, stream.uniform())).collect();
    TrialSpec::new(&pairs).expect("normalized weights")
}

pub fn random_strategy(stream: &mut RandomStream, n: usize) -> Strategy {
    Strategy::new((0..n).map(|_| stream.uniform()).collect()).expect("unit interval")
}

/// `N` uniform on `1..=MAX_OUTCOMES`, then a random trial and strategy.
pub fn random_instance(stream: &mut RandomStream) -> (TrialSpec, Strategy) {
    let n = 1 + (stream.next_u64() % MAX_OUTCOMES as u64) as usize;
    (random_trial(stream, n), random_strategy(stream, n))
}

/// Alternates single-outcome trials and uniform strategies; success is
/// relabelled when needed so that `p >= 1/2`.
pub fn theorem1_instance(stream: &mut RandomStream, index: usize) -> (TrialSpec, Strategy) {
    let n = if index.is_multiple_of(2) {
        1
    } else {
        1 + (stream.next_u64() % MAX_OUTCOMES as u64) as usize
    };
    let mut trial = random_trial(stream, n);
    if trial.success_probability() < 0.5 {
        trial = trial.relabelled();
    }
    let y = Strategy::uniform(stream.uniform(), n).expect("unit interval");
    (trial, y)
}

/// `N = 2` with `s_1 < 1/2 < s_2` and `p >= 1/2`.
pub fn theorem2_instance(stream: &mut RandomStream) -> (TrialSpec, Strategy) {
    let s1 = 0.5 * stream.uniform();
    let s2 = 0.5 + 0.5 * stream.uniform_open();
    // p >= 1/2 exactly when p_1 <= (s_2 - 1/2) / (s_2 - s_1).
    let p1 = stream.uniform() * (s2 - 0.5) / (s2 - s1);
    let trial = TrialSpec::new(&[(p1, s1), (1.0 - p1, s2)]).expect("valid");
    (trial, random_strategy(stream, 2))
}

/// `N = 2` with `s_1 < 1/2 < s_2` and weights chosen so that `p = 1/2`.
pub fn p_half_instance(stream: &mut RandomStream) -> (TrialSpec, Strategy) {
    let s1 = 0.5 * stream.uniform();
    let s2 = 0.5 + 0.5 * stream.uniform_open();
    let p1 = (s2 - 0.5) / (s2 - s1);
    let trial = TrialSpec::new(&[(p1, s1), (1.0 - p1, s2)]).expect("valid");
    (trial, random_strategy(stream, 2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub outcomes: Vec<(f64, f64)>,
    pub y: Vec<f64>,
    pub detail: f64,
}

impl Counterexample {
    fn new(trial: &TrialSpec, strat: &Strategy, detail: f64) -> Self {
        Counterexample {
            outcomes: trial
                .outcomes()
                .iter()
                .map(|o| (o.weight, o.success_prob))
                .collect(),
            y: strat.y().to_vec(),
            detail,
        }
    }
}

/// Outcome of one property suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub instances: usize,
    /// Instances on which the property had non-vacuous content.
    pub applicable: usize,
    pub violations: usize,
    pub first_violation: Option<Counterexample>,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        SuiteReport {
            name,
            instances: 0,
            applicable: 0,
            violations: 0,
            first_violation: None,
        }
    }

    fn observe(
        &mut self,
        applicable: bool,
        ok: bool,
        counterexample: impl FnOnce() -> Counterexample,
    ) {
        self.instances += 1;
        self.applicable += usize::from(applicable);
        if !ok {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(counterexample());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Substream indices, one per suite.
mod streams {
    pub const ORACLE: u64 = 1;
    pub const THEOREM1: u64 = 2;
    pub const THEOREM2: u64 = 3;
    pub const P_HALF: u64 = 4;
    pub const NON_NEGATIVE_EDGE: u64 = 5;
}

/// Brute-force enumeration agrees with the collapsed closed form to 1e-14.
pub fn oracle_suite(seed: u64, count: usize) -> SuiteReport {
    let mut stream = RandomStream::substream(seed, streams::ORACLE);
    let mut report = SuiteReport::new("oracle agreement");
    for _ in 0..count {
        let (t, y) = random_instance(&mut stream);
        let diff = (brute_force_psp(&t, &y).unwrap() - analytic_psp(&t, &y).unwrap()).abs();
        report.observe(true, diff <= ORACLE_TOLERANCE, || {
            Counterexample::new(&t, &y, diff)
        });
    }
    report
}

/// `PSP + edge = 1 + p` and the two PSP forms agree, both to 1e-12. Uses the
/// same instances as [`oracle_suite`].
pub fn identity_suite(seed: u64, count: usize) -> SuiteReport {
    let mut stream = RandomStream::substream(seed, streams::ORACLE);
    let mut report = SuiteReport::new("psp + edge identity");
    for _ in 0..count {
        let (t, y) = random_instance(&mut stream);
        let psp = analytic_psp(&t, &y).unwrap();
        let gap = (psp + edge_condition(&t, &y).unwrap() - 1.0 - t.success_probability()).abs();
        let forms = (psp - two_sum_psp(&t, &y).unwrap()).abs();
        let worst = gap.max(forms);
        report.observe(true, worst <= TOLERANCE, || {
            Counterexample::new(&t, &y, worst)
        });
    }
    report
}

/// Single outcome or uniform strategy never beats chance.
pub fn theorem1_suite(seed: u64, count: usize) -> SuiteReport {
    let mut stream = RandomStream::substream(seed, streams::THEOREM1);
    let mut report = SuiteReport::new("theorem 1 (N = 1 or uniform y)");
    for i in 0..count {
        let (t, y) = theorem1_instance(&mut stream, i);
        let v = check_theorem1(&t, &y).unwrap();
        let excess = analytic_psp(&t, &y).unwrap() - t.success_probability();
        report.observe(v.applicable, !v.applicable || v.holds, || {
            Counterexample::new(&t, &y, excess)
        });
    }
    report
}

/// Two outcomes: beating chance forces `y_2 > y_1`.
pub fn theorem2_suite(seed: u64, count: usize) -> SuiteReport {
    let mut stream = RandomStream::substream(seed, streams::THEOREM2);
    let mut report = SuiteReport::new("theorem 2 (PSP > p implies y2 > y1)");
    for _ in 0..count {
        let (t, y) = theorem2_instance(&mut stream);
        let v = check_theorem2(&t, &y).unwrap();
        let excess = analytic_psp(&t, &y).unwrap() - t.success_probability();
        report.observe(
            v.hypotheses_met,
            !v.hypotheses_met || v.conclusion_holds,
            || Counterexample::new(&t, &y, excess),
        );
    }
    report
}

/// With `p = 1/2`, `y_1 < y_2` is enough to beat chance.
pub fn p_half_suite(seed: u64, count: usize) -> SuiteReport {
    let mut stream = RandomStream::substream(seed, streams::P_HALF);
    let mut report = SuiteReport::new("p = 1/2 sufficiency");
    for _ in 0..count {
        let (t, y) = p_half_instance(&mut stream);
        let (applicable, ok) = match check_p_half_sufficiency(&t, &y) {
            Ok(v) => (v.antecedent, v.holds),
            Err(_) => (false, false),
        };
        let excess = analytic_psp(&t, &y).unwrap() - t.success_probability();
        report.observe(applicable, ok, || Counterexample::new(&t, &y, excess));
    }
    report
}

/// When every `s_k >= 1/2`, no strategy satisfies `edge < 1`.
pub fn high_success_edge_suite(seed: u64, count: usize) -> SuiteReport {
    let mut stream = RandomStream::substream(seed, streams::NON_NEGATIVE_EDGE);
    let mut report = SuiteReport::new("all s >= 1/2 implies edge >= 1");
    for _ in 0..count {
        let (t, y) = random_instance(&mut stream);
        let pairs: Vec<(f64, f64)> = t
            .outcomes()
            .iter()
            .map(|o| (o.weight, 0.5 + 0.5 * o.success_prob))
            .collect();
        let t = TrialSpec::new(&pairs).expect("valid");
        let edge = edge_condition(&t, &y).unwrap();
        report.observe(true, edge >= 1.0 - TOLERANCE, || {
            Counterexample::new(&t, &y, edge)
        });
    }
    report
}

/// Every suite, in a fixed order.
pub fn all_suites(seed: u64, count: usize) -> Vec<SuiteReport> {
    alloc::vec![
        theorem1_suite(seed, count),
        theorem2_suite(seed, count),
        p_half_suite(seed, count),
        oracle_suite(seed, count),
        identity_suite(seed, count),
        high_success_edge_suite(seed, count),
    ]
}
