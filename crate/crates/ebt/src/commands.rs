//! The four commands as plain functions returning serializable reports.

use ebt_core::fuzz::{self, Counterexample, SuiteReport};
use ebt_core::montecarlo::{
    binomial_test_greater, binomial_test_two_sided, AbstractTrial, Alternative, SimulationPlan,
    TestVerdict,
};
use ebt_core::scenarios::{FixedCoinBag, Scenario};
use ebt_core::trial::{self, check_theorem2, optimal_strategy};
use ebt_core::{Error as CoreError, RandomStream, SimResult, Strategy, TrialRunner, TrialSpec};
use serde::Serialize;
use serde_json::Value;

use crate::config::{ConfigError, Experiment, ExperimentConfig, OutcomeConfig, SweepConfig};
use crate::parallel;

/// Realizations averaged for the coin-bag analytic PSP when none is fixed.
pub const COIN_BAG_REALIZATIONS: usize = 100_000;
/// Substream reserved for drawing those realizations.
pub const COIN_BAG_SUBSTREAM: u64 = 1 << 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSource {
    Flag,
    Config,
    Env,
    Entropy,
}

/// `--seed`, then the config seed, then `EBT_DEFAULT_SEED`, then system entropy.
pub fn resolve_seed(
    flag: Option<u64>,
    config: Option<u64>,
    env: Option<&str>,
) -> Result<(u64, SeedSource), ConfigError> {
    if let Some(s) = flag {
        return Ok((s, SeedSource::Flag));
    }
    if let Some(s) = config {
        return Ok((s, SeedSource::Config));
    }
    if let Some(text) = env {
        let s = text.trim().parse().map_err(|_| {
            ConfigError::new(
                "EBT_DEFAULT_SEED",
                format!("{text:?} is not an unsigned integer"),
            )
        })?;
        return Ok((s, SeedSource::Env));
    }
    use std::hash::{BuildHasher, Hasher};
    let seed = std::collections::hash_map::RandomState::new()
        .build_hasher()
        .finish();
    Ok((seed, SeedSource::Entropy))
}

fn outcome_list(trial: &TrialSpec) -> Vec<OutcomeConfig> {
    trial
        .outcomes()
        .iter()
        .map(|o| OutcomeConfig {
            weight: o.weight,
            success_prob: o.success_prob,
        })
        .collect()
}

/// The experiment as an abstract trial, when it has one.
pub fn compile(exp: &Experiment) -> Result<(TrialSpec, Strategy), ConfigError> {
    match exp {
        Experiment::Abstract { trial, strategy } => Ok((trial.clone(), strategy.clone())),
        Experiment::Physical {
            scenario,
            realization,
        } => match scenario {
            Scenario::Envelope(s) => Ok(s.to_trial()),
            Scenario::Railroad(s) => Ok(s.to_trial()),
            Scenario::Willoughby(s) => Ok(s.to_trial()),
            Scenario::CoinBag(s) => {
                let r = realization.ok_or_else(|| {
                    ConfigError::new(
                        "realization",
                        "a coin bag needs fixed coin parameters to compile",
                    )
                })?;
                s.to_trial(&r)
                    .map_err(|e| ConfigError::new("realization", e))
            }
        },
    }
}

/// Marginal success probability and analytic PSP.
pub fn analytic(exp: &Experiment, seed: u64) -> (f64, f64) {
    match exp {
        Experiment::Physical {
            scenario: Scenario::CoinBag(s),
            realization: None,
        } => {
            let mut stream = RandomStream::substream(seed, COIN_BAG_SUBSTREAM);
            (
                0.5 * (s.s1() + s.s2()),
                s.expected_psp(COIN_BAG_REALIZATIONS, &mut stream),
            )
        }
        _ => {
            let (t, y) = compile(exp).expect("compilable");
            (
                t.success_probability(),
                trial::analytic_psp(&t, &y).expect("lengths checked"),
            )
        }
    }
}

/// Chance level the hit rate is tested against.
pub fn null_value(exp: &Experiment) -> f64 {
    match exp {
        Experiment::Abstract { trial, .. } => trial.success_probability(),
        Experiment::Physical { scenario, .. } => scenario.chance_level(),
    }
}

pub fn runner(exp: &Experiment) -> Box<dyn TrialRunner> {
    match exp {
        Experiment::Abstract { trial, strategy } => {
            Box::new(AbstractTrial::new(trial.clone(), strategy.clone()).expect("lengths checked"))
        }
        Experiment::Physical {
            scenario: Scenario::CoinBag(s),
            realization: Some(r),
        } => Box::new(FixedCoinBag::new(*s, *r).expect("realization checked")),
        Experiment::Physical { scenario, .. } => Box::new(*scenario),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisOutput {
    pub kind: &'static str,
    pub outcomes: Vec<OutcomeConfig>,
    pub y: Vec<f64>,
    pub p: f64,
    pub psp: f64,
    pub edge: f64,
    pub beats_chance: bool,
    pub premium_bound: f64,
    pub optimal_y: Vec<f64>,
}

pub fn analyze(exp: &Experiment) -> Result<AnalysisOutput, ConfigError> {
    let (t, y) = compile(exp)?;
    let report = trial::analyze(&t, &y).map_err(|e| ConfigError::new("y", e))?;
    let (best, _) = optimal_strategy(&t);
    Ok(AnalysisOutput {
        kind: exp.kind(),
        outcomes: outcome_list(&t),
        y: y.y().to_vec(),
        p: report.p,
        psp: report.psp,
        edge: report.edge,
        beats_chance: report.beats_chance,
        premium_bound: report.premium_bound,
        optimal_y: best.y().to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RejectionOutput {
    pub alpha: f64,
    pub reject: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestOutput {
    pub null_value: f64,
    pub alternative: &'static str,
    pub p_value: f64,
    pub reject_at: Vec<RejectionOutput>,
}

impl From<TestVerdict> for TestOutput {
    fn from(v: TestVerdict) -> Self {
        TestOutput {
            null_value: v.null_value,
            alternative: match v.alternative {
                Alternative::Greater => "greater",
                Alternative::TwoSided => "two_sided",
            },
            p_value: v.p_value,
            reject_at: v
                .reject_at
                .iter()
                .map(|r| RejectionOutput {
                    alpha: r.alpha,
                    reject: r.reject,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellOutput {
    pub n: u64,
    pub hits: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultOutput {
    pub n: u64,
    pub hits: u64,
    pub successes: u64,
    pub empirical_psp: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub partition_size: u64,
    pub partitions: u64,
    pub cells: Vec<CellOutput>,
}

impl From<&SimResult> for ResultOutput {
    fn from(r: &SimResult) -> Self {
        ResultOutput {
            n: r.n,
            hits: r.hits,
            successes: r.successes,
            empirical_psp: r.empirical_psp,
            std_error: r.std_error,
            ci_low: r.ci_low,
            ci_high: r.ci_high,
            seed: r.seed,
            partition_size: r.partition_size,
            partitions: r.partitions,
            cells: r
                .cells
                .iter()
                .map(|c| CellOutput {
                    n: c.n,
                    hits: c.hits,
                })
                .collect(),
        }
    }
}

/// One row of the railroad comparison: joint probability of landing in the row
/// and guessing right, analytic against observed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RailroadRowOutput {
    pub station: &'static str,
    pub spinner: &'static str,
    pub direction: &'static str,
    pub pointer_correct: f64,
    pub analytic: f64,
    pub empirical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationOutput {
    pub kind: &'static str,
    pub seed: u64,
    pub seed_source: SeedSource,
    pub p: f64,
    pub analytic_psp: f64,
    pub result: ResultOutput,
    /// One-sided test of the hit rate against chance.
    pub hit_test: Option<TestOutput>,
    /// Two-sided test of the success rate against `p`.
    pub success_test: Option<TestOutput>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub railroad_table: Option<Vec<RailroadRowOutput>>,
    #[serde(skip)]
    pub raw: SimResult,
}

pub fn simulate(
    exp: &Experiment,
    plan: &SimulationPlan,
    workers: usize,
    seed_source: SeedSource,
) -> SimulationOutput {
    let raw = parallel::simulate(runner(exp).as_ref(), plan, workers);
    let (p, analytic_psp) = analytic(exp, plan.seed);
    let hit_test = binomial_test_greater(&raw, null_value(exp))
        .ok()
        .map(TestOutput::from);
    let success_test = binomial_test_two_sided(raw.successes, raw.n, p)
        .ok()
        .map(TestOutput::from);
    let railroad_table = match exp {
        Experiment::Physical {
            scenario: Scenario::Railroad(s),
            ..
        } => Some(
            s.table()
                .iter()
                .zip(raw.cells.iter())
                .map(|(row, cell)| RailroadRowOutput {
                    station: match row.station {
                        ebt_core::scenarios::Station::S1 => "S1",
                        ebt_core::scenarios::Station::S2 => "S2",
                    },
                    spinner: if row.red { "red" } else { "blue" },
                    direction: if row.east { "east" } else { "west" },
                    pointer_correct: row.pointer_correct,
                    analytic: row.combined,
                    empirical: cell.hits as f64 / raw.n as f64,
                })
                .collect(),
        ),
        _ => None,
    };
    SimulationOutput {
        kind: exp.kind(),
        seed: plan.seed,
        seed_source,
        p,
        analytic_psp,
        result: ResultOutput::from(&raw),
        hit_test,
        success_test,
        railroad_table,
        raw,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub p: f64,
    pub analytic_psp: f64,
    pub empirical_psp: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutput {
    pub kind: &'static str,
    pub param: String,
    pub seed: Option<u64>,
    pub rows: Vec<SweepRow>,
}

enum Segment<'a> {
    Key(&'a str),
    Index(usize),
}

fn parse_path(path: &str) -> Option<Vec<Segment<'_>>> {
    let mut out = Vec::new();
    for part in path.split('.') {
        let (name, mut rest) = match part.find('[') {
            Some(i) => (&part[..i], &part[i..]),
            None => (part, ""),
        };
        if name.is_empty() {
            return None;
        }
        out.push(Segment::Key(name));
        while !rest.is_empty() {
            let close = rest.find(']')?;
            if !rest.starts_with('[') {
                return None;
            }
            out.push(Segment::Index(rest[1..close].parse().ok()?));
            rest = &rest[close + 1..];
        }
    }
    Some(out)
}

/// Overwrites the number at `path` (for example `r` or `outcomes[1].success_prob`).
pub fn set_numeric(doc: &mut Value, path: &str, value: f64) -> Result<(), ConfigError> {
    let field = format!("sweep.param {path:?}");
    let segments = parse_path(path).ok_or_else(|| ConfigError::new(&field, "malformed path"))?;
    let mut node = doc;
    for seg in segments {
        node = match seg {
            Segment::Key(k) => node.get_mut(k),
            Segment::Index(i) => node.get_mut(i),
        }
        .ok_or_else(|| ConfigError::new(&field, "no such field"))?;
    }
    if !node.is_number() {
        return Err(ConfigError::new(&field, "is not numeric"));
    }
    *node = serde_json::Number::from_f64(value)
        .map(Value::Number)
        .ok_or_else(|| ConfigError::new(&field, "value must be finite"))?;
    Ok(())
}

/// Validates every swept value, then evaluates them in order.
pub fn sweep(
    cfg: &ExperimentConfig,
    spec: &SweepConfig,
    seed: Option<u64>,
    workers: usize,
) -> Result<SweepOutput, ConfigError> {
    if spec.values.is_empty() {
        return Err(ConfigError::new("sweep.values", "must not be empty"));
    }
    if spec.simulate && seed.is_none() {
        return Err(ConfigError::new("seed", "simulated sweeps need a seed"));
    }
    let base = serde_json::to_value(cfg).expect("config serializes");
    let mut experiments = Vec::with_capacity(spec.values.len());
    for (i, &v) in spec.values.iter().enumerate() {
        let mut doc = base.clone();
        set_numeric(&mut doc, &spec.param, v)?;
        let exp = serde_json::from_value::<ExperimentConfig>(doc)
            .map_err(|e| ConfigError::new("config", e))
            .and_then(|c| c.build())
            .map_err(|e| ConfigError::new(format!("sweep.values[{i}] = {v}"), e))?;
        experiments.push(exp);
    }
    let seed_for_analytic = seed.unwrap_or(0);
    let rows = spec
        .values
        .iter()
        .zip(&experiments)
        .map(|(&value, exp)| {
            let (p, analytic_psp) = analytic(exp, seed_for_analytic);
            let sim = seed.filter(|_| spec.simulate).map(|s| {
                let plan = SimulationPlan::new(cfg.simulation.n, s, cfg.simulation.partition_size)
                    .expect("checked by build");
                parallel::simulate(runner(exp).as_ref(), &plan, workers)
            });
            SweepRow {
                param: spec.param.clone(),
                value,
                p,
                analytic_psp,
                empirical_psp: sim.map(|r| r.empirical_psp),
                ci_low: sim.map(|r| r.ci_low),
                ci_high: sim.map(|r| r.ci_high),
            }
        })
        .collect();
    Ok(SweepOutput {
        kind: experiments[0].kind(),
        param: spec.param.clone(),
        seed: seed.filter(|_| spec.simulate),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleOutput {
    pub outcomes: Vec<OutcomeConfig>,
    pub y: Vec<f64>,
    pub detail: f64,
}

impl From<&Counterexample> for CounterexampleOutput {
    fn from(c: &Counterexample) -> Self {
        CounterexampleOutput {
            outcomes: c
                .outcomes
                .iter()
                .map(|&(weight, success_prob)| OutcomeConfig {
                    weight,
                    success_prob,
                })
                .collect(),
            y: c.y.clone(),
            detail: c.detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutput {
    pub name: &'static str,
    pub instances: usize,
    pub applicable: usize,
    pub violations: usize,
    pub passed: bool,
    pub first_violation: Option<CounterexampleOutput>,
}

impl From<&SuiteReport> for SuiteOutput {
    fn from(r: &SuiteReport) -> Self {
        SuiteOutput {
            name: r.name,
            instances: r.instances,
            applicable: r.applicable,
            violations: r.violations,
            passed: r.passed(),
            first_violation: r.first_violation.as_ref().map(CounterexampleOutput::from),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOutput {
    pub seed: u64,
    pub seed_source: SeedSource,
    pub instances: usize,
    pub suites: Vec<SuiteOutput>,
    /// How the two-outcome ordering check treats the three-outcome table example.
    pub three_outcome_table: String,
    pub passed: bool,
}

/// The three-outcome example whose strategy beats chance without being ordered.
pub fn table_example() -> (TrialSpec, Strategy) {
    (
        TrialSpec::new(&[(0.2, 0.3), (0.3, 0.5), (0.5, 0.7)]).expect("weights sum to 1"),
        Strategy::new(vec![0.1, 0.9, 0.7]).expect("in range"),
    )
}

pub fn verify_theorems(
    seed: u64,
    seed_source: SeedSource,
    instances: usize,
) -> Result<VerifyOutput, ConfigError> {
    if instances == 0 {
        return Err(ConfigError::new("--instances", "must be at least 1"));
    }
    let suites: Vec<SuiteOutput> = fuzz::all_suites(seed, instances)
        .iter()
        .map(SuiteOutput::from)
        .collect();
    let (t, y) = table_example();
    let three_outcome_table = match check_theorem2(&t, &y) {
        Err(e @ CoreError::WrongArity { .. }) => format!("rejected as a non-example: {e}"),
        Err(e) => format!("unexpected error: {e}"),
        Ok(v) => format!("unexpectedly accepted: {v:?}"),
    };
    let passed = suites.iter().all(|s| s.passed);
    Ok(VerifyOutput {
        seed,
        seed_source,
        instances,
        suites,
        three_outcome_table,
        passed,
    })
}
