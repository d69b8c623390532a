//! Runs the partitions of a [`SimulationPlan`] on a rayon pool.
//!
//! Partition tallies are collected in index order and merged sequentially, so
//! the result is bit-identical to [`ebt_core::montecarlo::simulate`] for any
//! worker count.

use ebt_core::montecarlo::{SimulationPlan, Tally};
use ebt_core::{SimResult, TrialRunner};
use rayon::prelude::*;

pub fn default_workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Simulates `plan` with `workers` threads.
pub fn simulate<R: TrialRunner + ?Sized>(
    runner: &R,
    plan: &SimulationPlan,
    workers: usize,
) -> SimResult {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    let tallies: Vec<Tally> = pool.install(|| {
        (0..plan.partition_count())
            .into_par_iter()
            .map(|i| plan.run_partition(runner, i))
            .collect()
    });
    plan.finish(tallies.into_iter().fold(Tally::default(), Tally::merge))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ebt_core::montecarlo::AbstractTrial;
    use ebt_core::{Strategy, TrialSpec};

    #[test]
    fn matches_sequential() {
        let t = TrialSpec::new(&[(0.5, 0.4), (0.5, 0.7)]).unwrap();
        let runner = AbstractTrial::new(t, Strategy::new(vec![0.0, 1.0]).unwrap()).unwrap();
        let plan = SimulationPlan::new(50_001, 9, 4096).unwrap();
        let seq = ebt_core::montecarlo::simulate(&runner, &plan);
        for w in [1, 3, 8] {
            assert_eq!(simulate(&runner, &plan, w), seq);
        }
    }
}
