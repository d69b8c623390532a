//! Partitioned, reproducible Monte Carlo over independent trials.
//!
//! `n` trials are cut into consecutive partitions of `partition_size` trials.
//! Partition `i` draws from [`RandomStream::substream`]`(seed, i)`, so its tally
//! depends only on `(seed, i, len)`. Tallies are integer counts and merge
//! exactly, which makes the aggregate independent of how partitions are
//! scheduled across workers.

mod oracle;
mod stats;

pub use oracle::brute_force_psp;
pub use stats::{
    binomial_test_greater, binomial_test_two_sided, binomial_upper_tail, ks_distance, normal_cdf,
    wilson_interval, Alternative, Rejection, TestVerdict, EXACT_TEST_MAX_N, SIGNIFICANCE_LEVELS,
    Z_99,
};

use crate::error::{Error, Result};
use crate::stream::RandomStream;
use crate::trial::{Strategy, TrialSpec};

pub const DEFAULT_PARTITION_SIZE: u64 = 65_536;

/// Number of preparation cells tracked per tally.
pub const CELLS: usize = 4;

/// Result of one simulated trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrialOutcome {
    /// The prediction matched the outcome.
    pub hit: bool,
    /// The second stage produced "success" (heads, east, ...).
    pub success: bool,
    /// Optional preparation cell (for instance station x spinner colour).
    pub cell: Option<u8>,
}

/// Anything that can run one trial from a random stream.
pub trait TrialRunner: Sync {
    fn run(&self, stream: &mut RandomStream) -> TrialOutcome;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CellTally {
    pub n: u64,
    pub hits: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub n: u64,
    pub hits: u64,
    pub successes: u64,
    pub cells: [CellTally; CELLS],
}

impl Tally {
    pub fn record(&mut self, outcome: TrialOutcome) {
        self.n += 1;
        self.hits += u64::from(outcome.hit);
        self.successes += u64::from(outcome.success);
        if let Some(cell) = outcome.cell.map(usize::from).filter(|&c| c < CELLS) {
            self.cells[cell].n += 1;
            self.cells[cell].hits += u64::from(outcome.hit);
        }
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        self.n += other.n;
        self.hits += other.hits;
        self.successes += other.successes;
        for (a, b) in self.cells.iter_mut().zip(other.cells) {
            a.n += b.n;
            a.hits += b.hits;
        }
        self
    }
}

/// The reproducibility key of a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationPlan {
    pub n: u64,
    pub seed: u64,
    pub partition_size: u64,
}

impl SimulationPlan {
    pub fn new(n: u64, seed: u64, partition_size: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroTrials);
        }
        if partition_size == 0 {
            return Err(Error::ZeroPartitionSize);
        }
        Ok(Self {
            n,
            seed,
            partition_size,
        })
    }

    pub fn with_default_partitions(n: u64, seed: u64) -> Result<Self> {
        Self::new(n, seed, DEFAULT_PARTITION_SIZE)
    }

    pub fn partition_count(&self) -> u64 {
        self.n.div_ceil(self.partition_size)
    }

    /// Length of partition `index`.
    pub fn partition_len(&self, index: u64) -> u64 {
        let start = index * self.partition_size;
        self.partition_size.min(self.n.saturating_sub(start))
    }

    pub fn run_partition<R: TrialRunner + ?Sized>(&self, runner: &R, index: u64) -> Tally {
        let mut stream = RandomStream::substream(self.seed, index);
        let mut tally = Tally::default();
        for _ in 0..self.partition_len(index) {
            tally.record(runner.run(&mut stream));
        }
        tally
    }

    pub fn finish(&self, tally: Tally) -> SimResult {
        SimResult::from_tally(tally, self)
    }
}

/// Aggregate of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimResult {
    pub n: u64,
    pub hits: u64,
    /// Trials whose second stage was a success, independent of the prediction.
    pub successes: u64,
    pub empirical_psp: f64,
    pub std_error: f64,
    /// Two-sided 99% Wilson score interval for the hit rate.
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub partition_size: u64,
    pub partitions: u64,
    pub cells: [CellTally; CELLS],
}

impl SimResult {
    pub fn from_tally(tally: Tally, plan: &SimulationPlan) -> Self {
        let empirical_psp = tally.hits as f64 / tally.n as f64;
        let (ci_low, ci_high) = wilson_interval(tally.hits, tally.n, Z_99);
        SimResult {
            n: tally.n,
            hits: tally.hits,
            successes: tally.successes,
            empirical_psp,
            std_error: libm::sqrt(empirical_psp * (1.0 - empirical_psp) / tally.n as f64),
            ci_low,
            ci_high,
            seed: plan.seed,
            partition_size: plan.partition_size,
            partitions: plan.partition_count(),
            cells: tally.cells,
        }
    }

    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.n as f64
    }
}

/// Runs every partition in index order on the calling thread.
pub fn simulate<R: TrialRunner + ?Sized>(runner: &R, plan: &SimulationPlan) -> SimResult {
    let tally = (0..plan.partition_count())
        .map(|i| plan.run_partition(runner, i))
        .fold(Tally::default(), Tally::merge);
    plan.finish(tally)
}

/// Abstract simulation of a (trial, strategy) pair: the pointer is replaced by a
/// Bernoulli(`y_k`) "predict success" draw.
#[derive(Debug, Clone)]
pub struct AbstractTrial {
    trial: TrialSpec,
    strategy: Strategy,
}

impl AbstractTrial {
    pub fn new(trial: TrialSpec, strategy: Strategy) -> Result<Self> {
        if trial.len() != strategy.len() {
            return Err(Error::LengthMismatch {
                trial: trial.len(),
                strategy: strategy.len(),
            });
        }
        Ok(Self { trial, strategy })
    }
}

impl TrialRunner for AbstractTrial {
    fn run(&self, stream: &mut RandomStream) -> TrialOutcome {
        let outcomes = self.trial.outcomes();
        let k = stream.categorical(outcomes.iter().map(|o| o.weight));
        let predict_success = stream.bernoulli(self.strategy.y()[k]);
        let success = stream.bernoulli(outcomes[k].success_prob);
        TrialOutcome {
            hit: predict_success == success,
            success,
            cell: u8::try_from(k).ok(),
        }
    }
}

/// Simulates `n` abstract trials with the default partition size.
pub fn simulate_trial(trial: &TrialSpec, strat: &Strategy, n: u64, seed: u64) -> Result<SimResult> {
    let runner = AbstractTrial::new(trial.clone(), strat.clone())?;
    Ok(simulate(
        &runner,
        &SimulationPlan::with_default_partitions(n, seed)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn table() -> (TrialSpec, Strategy) {
        (
            TrialSpec::new(&[(0.2, 0.3), (0.3, 0.5), (0.5, 0.7)]).unwrap(),
            Strategy::new(vec![0.1, 0.9, 0.7]).unwrap(),
        )
    }

    #[test]
    fn single_trial() {
        let (t, y) = table();
        let r = simulate_trial(&t, &y, 1, 3).unwrap();
        assert_eq!(r.n, 1);
        assert!(r.hits <= 1);
        assert_eq!(r.partitions, 1);
        assert!(r.ci_low <= r.empirical_psp && r.empirical_psp <= r.ci_high);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (t, _) = table();
        let y = Strategy::new(vec![0.5]).unwrap();
        assert!(matches!(
            simulate_trial(&t, &y, 10, 0),
            Err(Error::LengthMismatch { .. })
        ));
        let (t, y) = table();
        assert_eq!(simulate_trial(&t, &y, 0, 0), Err(Error::ZeroTrials));
        assert_eq!(SimulationPlan::new(10, 0, 0), Err(Error::ZeroPartitionSize));
    }

    #[test]
    fn partition_lengths_cover_n() {
        let plan = SimulationPlan::new(1000, 1, 300).unwrap();
        assert_eq!(plan.partition_count(), 4);
        let lens: alloc::vec::Vec<_> = (0..4).map(|i| plan.partition_len(i)).collect();
        assert_eq!(lens, [300, 300, 300, 100]);
    }

    #[test]
    fn always_predict_success_tracks_p() {
        let (t, _) = table();
        let ones = Strategy::uniform(1.0, 3).unwrap();
        let r = simulate_trial(&t, &ones, 200_000, 17).unwrap();
        assert_eq!(r.hits, r.successes);
        assert!((r.empirical_psp - 0.56).abs() < 4.0 * r.std_error);
    }

    #[test]
    fn merge_is_order_free() {
        let (t, y) = table();
        let runner = AbstractTrial::new(t, y).unwrap();
        let plan = SimulationPlan::new(10_000, 5, 1000).unwrap();
        let parts: alloc::vec::Vec<_> = (0..plan.partition_count())
            .map(|i| plan.run_partition(&runner, i))
            .collect();
        let forward = parts.iter().copied().fold(Tally::default(), Tally::merge);
        let backward = parts
            .iter()
            .rev()
            .copied()
            .fold(Tally::default(), Tally::merge);
        assert_eq!(forward, backward);
        assert_eq!(plan.finish(forward), simulate(&runner, &plan));
    }
}
