use ebt_core::fuzz;
use ebt_core::montecarlo::{self, brute_force_psp, ks_distance, AbstractTrial, SimulationPlan};
use ebt_core::pointer::{HalfLineRegion, PointerDistribution};
use ebt_core::scenarios::{
    CoinBagScenario, EnvelopeScenario, PointerModel, RailroadScenario, WilloughbyScenario,
};
use ebt_core::trial::{analytic_psp, edge_condition, optimal_strategy, premium, two_sum_psp};
use ebt_core::{RandomStream, TrialSpec};
use proptest::prelude::*;

fn trial_and_strategy() -> impl Strategy<Value = (TrialSpec, ebt_core::Strategy)> {
    (1usize..=8).prop_flat_map(|n| {
        (
            prop::collection::vec(0.001f64..1.0, n),
            prop::collection::vec(0.0f64..=1.0, n),
            prop::collection::vec(0.0f64..=1.0, n),
        )
            .prop_map(|(w, s, y)| {
                let total: f64 = w.iter().sum();
                let pairs: Vec<(f64, f64)> = w.iter().map(|w| w / total).zip(s).collect();
                (
                    TrialSpec::new(&pairs).unwrap(),
                    ebt_core::Strategy::new(y).unwrap(),
                )
            })
    })
}

fn pointer() -> impl Strategy<Value = PointerDistribution> {
    prop_oneof![
        (-5.0f64..5.0, 0.1f64..5.0).prop_map(|(m, s)| PointerDistribution::normal(m, s).unwrap()),
        (-5.0f64..5.0, 0.1f64..5.0).prop_map(|(m, s)| PointerDistribution::cauchy(m, s).unwrap()),
        (-5.0f64..5.0, 0.1f64..5.0).prop_map(|(m, s)| PointerDistribution::logistic(m, s).unwrap()),
        (0.1f64..5.0).prop_map(|r| PointerDistribution::exponential(r).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn psp_plus_edge_is_one_plus_p((t, y) in trial_and_strategy()) {
        let psp = analytic_psp(&t, &y).unwrap();
        let edge = edge_condition(&t, &y).unwrap();
        prop_assert!((psp + edge - 1.0 - t.success_probability()).abs() <= 1e-12);
        prop_assert!((psp - two_sum_psp(&t, &y).unwrap()).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&psp));
        prop_assert!((brute_force_psp(&t, &y).unwrap() - psp).abs() <= 1e-14);
        if edge < 1.0 - 1e-12 {
            prop_assert!(psp > t.success_probability());
        } else if edge > 1.0 + 1e-12 {
            prop_assert!(psp < t.success_probability());
        }
    }

    #[test]
    fn optimal_strategy_dominates((t, y) in trial_and_strategy()) {
        let (best, max_psp) = optimal_strategy(&t);
        prop_assert!((analytic_psp(&t, &best).unwrap() - max_psp).abs() <= 1e-12);
        prop_assert!(max_psp >= analytic_psp(&t, &y).unwrap() - 1e-12);
        prop_assert!((max_psp - t.success_probability() - premium(&t)).abs() <= 1e-15);
    }

    #[test]
    fn psp_monotone_in_each_coordinate((t, y) in trial_and_strategy(), k in 0usize..8, bump in 0.0f64..1.0) {
        let k = k % t.len();
        let mut raised = y.y().to_vec();
        raised[k] = raised[k] + (1.0 - raised[k]) * bump;
        let raised = ebt_core::Strategy::new(raised).unwrap();
        let delta = analytic_psp(&t, &raised).unwrap() - analytic_psp(&t, &y).unwrap();
        let s = t.outcomes()[k].success_prob;
        if s > 0.5 {
            prop_assert!(delta >= -1e-15);
        } else if s < 0.5 {
            prop_assert!(delta <= 1e-15);
        } else {
            prop_assert!(delta.abs() <= 1e-15);
        }
    }

    #[test]
    fn high_success_probabilities_never_beat_chance((t, y) in trial_and_strategy()) {
        let pairs: Vec<(f64, f64)> = t.outcomes().iter().map(|o| (o.weight, 0.5 + 0.5 * o.success_prob)).collect();
        let t = TrialSpec::new(&pairs).unwrap();
        prop_assert!(edge_condition(&t, &y).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn regions_are_complementary(d in pointer(), t in -50.0f64..50.0) {
        let below = d.region_probability(HalfLineRegion::below(t).unwrap());
        let above = d.region_probability(HalfLineRegion::above(t).unwrap());
        prop_assert!((below + above - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn full_support(d in pointer(), a in 0.01f64..0.99, b in 0.01f64..0.99) {
        // Interior points chosen by quantile so they are inside every support.
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-6);
        let s = d.quantile(lo);
        let l = d.quantile(hi);
        let p = d.region_probability(HalfLineRegion::below(s).unwrap());
        let q = d.region_probability(HalfLineRegion::above(l).unwrap());
        prop_assert!(p + q < 1.0);
        prop_assert!(d.cdf(s) > 0.0 && d.cdf(s) < 1.0);
    }

    #[test]
    fn cdf_strictly_increasing(d in pointer(), mut xs in prop::collection::vec(0.01f64..0.99, 2..50)) {
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() < 1e-4);
        let points: Vec<f64> = xs.iter().map(|&u| d.quantile(u)).collect();
        for w in points.windows(2) {
            prop_assert!(d.cdf(w[0]) < d.cdf(w[1]));
        }
    }

    #[test]
    fn railroad_compiles_faithfully(r in 0.501f64..0.999, a in -10.0f64..10.0, gap in 0.01f64..10.0, d in pointer()) {
        let sc = RailroadScenario::new(a, a + gap, r, d).unwrap();
        let (t, y) = sc.to_trial();
        prop_assert!((analytic_psp(&t, &y).unwrap() - sc.psp()).abs() <= 1e-12);
    }
}

#[test]
fn sampler_matches_cdf() {
    let dists = [
        PointerDistribution::normal(0.0, 1.0).unwrap(),
        PointerDistribution::cauchy(0.0, 1.0).unwrap(),
        PointerDistribution::logistic(1.0, 2.0).unwrap(),
        PointerDistribution::exponential(1.0).unwrap(),
    ];
    for (i, d) in dists.iter().enumerate() {
        let mut s = RandomStream::substream(99, i as u64);
        let samples: Vec<f64> = (0..100_000).map(|_| d.sample(&mut s)).collect();
        let dist = ks_distance(&samples, d).unwrap();
        assert!(dist < 0.01, "{d}: {dist}");
    }
}

#[test]
fn normal_sample_mean() {
    let d = PointerDistribution::normal(0.0, 1.0).unwrap();
    let mut s = RandomStream::new(123);
    let n = 1_000_000;
    let mean = (0..n).map(|_| d.sample(&mut s)).sum::<f64>() / n as f64;
    assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "{mean}");
}

#[test]
fn coin_bag_compiles_faithfully() {
    let mut s = RandomStream::new(55);
    for i in 0..100 {
        let s1 = 0.49 * s.uniform();
        let model = [
            PointerModel::Position,
            PointerModel::Mass,
            PointerModel::Time,
        ][i % 3];
        let d = match i % 4 {
            0 => PointerDistribution::cauchy(0.5, 0.3).unwrap(),
            1 => PointerDistribution::normal(0.5, 1.0).unwrap(),
            2 => PointerDistribution::logistic(0.0, 0.5).unwrap(),
            _ => PointerDistribution::exponential(2.0).unwrap(),
        };
        let sc = CoinBagScenario::new(s1, 1.0 - s1, model, Default::default(), d).unwrap();
        let r = sc.draw_realization(&mut s);
        let (t, y) = sc.to_trial(&r).unwrap();
        assert!(y.y()[1] > y.y()[0]);
        let psp = analytic_psp(&t, &y).unwrap();
        assert!((psp - sc.psp(&r).unwrap()).abs() <= 1e-12);
        assert!(psp > 0.5);
        assert!((t.success_probability() - 0.5).abs() <= 1e-12);
    }
}

#[test]
fn every_scenario_beats_chance() {
    let mut s = RandomStream::new(77);
    for _ in 0..100 {
        let d = PointerDistribution::cauchy(5.0 * s.uniform(), 0.5 + s.uniform()).unwrap();
        let small = 0.1 + 5.0 * s.uniform();
        let large = small + 0.1 + 5.0 * s.uniform();
        assert!(EnvelopeScenario::new(small, large, d).unwrap().psp() > 0.5);
        assert!(
            RailroadScenario::new(small, large, 0.51 + 0.48 * s.uniform(), d)
                .unwrap()
                .psp()
                > 0.5
        );
        let w = WilloughbyScenario::new(small, 0.5 * (small + large), large, d).unwrap();
        assert!(w.psp() > 0.5);
        let (t, y) = w.to_trial();
        assert!((analytic_psp(&t, &y).unwrap() - w.psp()).abs() < 1e-12);
    }
}

#[test]
fn wilson_interval_covers() {
    let t = TrialSpec::new(&[(0.2, 0.3), (0.3, 0.5), (0.5, 0.7)]).unwrap();
    let y = ebt_core::Strategy::new(vec![0.1, 0.9, 0.7]).unwrap();
    let truth = analytic_psp(&t, &y).unwrap();
    let runner = AbstractTrial::new(t, y).unwrap();
    let covered = (0..200u64)
        .filter(|&seed| {
            let r = montecarlo::simulate(
                &runner,
                &SimulationPlan::with_default_partitions(10_000, seed).unwrap(),
            );
            r.ci_low <= truth && truth <= r.ci_high
        })
        .count();
    assert!(covered >= 190, "{covered}/200");
}

#[test]
fn theorem_suites_at_full_size() {
    for report in fuzz::all_suites(1, 1000) {
        assert!(report.passed(), "{report:?}");
    }
}
