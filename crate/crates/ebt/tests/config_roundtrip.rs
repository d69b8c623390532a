use ebt::config::{
    ExperimentKind, ModelConfig, OutcomeConfig, OutputConfig, RealizationConfig, SimulationConfig,
    SweepConfig,
};
use ebt::{ExperimentConfig, Format};
use proptest::prelude::*;

fn pointer() -> impl Strategy<Value = String> {
    prop_oneof![
        (-5.0f64..5.0, 0.1f64..5.0).prop_map(|(a, b)| format!("normal:{a},{b}")),
        (-5.0f64..5.0, 0.1f64..5.0).prop_map(|(a, b)| format!("cauchy:{a},{b}")),
        (-5.0f64..5.0, 0.1f64..5.0).prop_map(|(a, b)| format!("logistic:{a},{b}")),
    ]
}

fn abstract_trial() -> impl Strategy<Value = ExperimentKind> {
    (1usize..=8).prop_flat_map(|n| {
        (
            prop::collection::vec(0.001f64..1.0, n),
            prop::collection::vec(0.0f64..=1.0, n),
            prop::collection::vec(0.0f64..=1.0, n),
        )
            .prop_map(|(w, s, y)| {
                // Weights are built so their floating sum is exactly 1.
                let total: f64 = w.iter().sum();
                let mut weights: Vec<f64> = w.iter().map(|x| x / total).collect();
                let head: f64 = weights[..weights.len() - 1].iter().sum();
                *weights.last_mut().unwrap() = 1.0 - head;
                let outcomes = weights
                    .into_iter()
                    .zip(s)
                    .map(|(weight, success_prob)| OutcomeConfig {
                        weight,
                        success_prob,
                    })
                    .collect();
                ExperimentKind::AbstractTrial { outcomes, y }
            })
    })
}

fn experiment() -> impl Strategy<Value = ExperimentKind> {
    prop_oneof![
        abstract_trial(),
        (0.01f64..10.0, 0.01f64..10.0, 0.1f64..3.0).prop_map(|(s, gap, rate)| {
            ExperimentKind::Envelope {
                small_amount: s,
                large_amount: s + gap,
                pointer: format!("exponential:{rate}"),
            }
        }),
        (-10.0f64..10.0, 0.01f64..10.0, 0.501f64..0.999, pointer()).prop_map(
            |(a, gap, r, pointer)| {
                ExperimentKind::Railroad {
                    s1_position: a,
                    s2_position: a + gap,
                    r,
                    pointer,
                }
            }
        ),
        (-10.0f64..10.0, 0.01f64..5.0, 0.01f64..5.0, pointer()).prop_map(|(c, w, e, pointer)| {
            ExperimentKind::Willoughby {
                west_station: c - w,
                current_station: c,
                east_station: c + e,
                pointer,
            }
        }),
        (
            0.0f64..0.49,
            0..3usize,
            any::<bool>(),
            0.0f64..0.5,
            0.5f64..1.0
        )
            .prop_map(|(s1, m, fixed, lo, hi)| {
                ExperimentKind::CoinBag {
                    s1,
                    s2: 1.0 - s1,
                    model: [ModelConfig::Position, ModelConfig::Mass, ModelConfig::Time][m],
                    parameter_sampler: ["uniform:0,1".into(), "uniform:0,1".into()],
                    pointer: "cauchy:0.5,1".into(),
                    realization: fixed.then_some(RealizationConfig {
                        coin1_parameter: hi,
                        coin2_parameter: lo,
                    }),
                }
            }),
    ]
}

fn config() -> impl Strategy<Value = ExperimentConfig> {
    (
        experiment(),
        1u64..10_000_000,
        prop::option::of(any::<u64>()),
        1u64..1_000_000,
        prop::option::of(1usize..64),
        prop::option::of(prop_oneof![
            Just(Format::Json),
            Just(Format::Csv),
            Just(Format::Text)
        ]),
        prop::option::of(prop::collection::vec(-1.0f64..1.0, 0..5)),
    )
        .prop_map(
            |(experiment, n, seed, partition_size, workers, format, sweep)| ExperimentConfig {
                experiment,
                simulation: SimulationConfig {
                    n,
                    seed,
                    partition_size,
                    workers,
                },
                output: OutputConfig { format, path: None },
                sweep: sweep.map(|values| SweepConfig {
                    param: "simulation.n".into(),
                    values,
                    simulate: false,
                }),
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn serialize_then_parse_is_identity(cfg in config()) {
        prop_assert!(cfg.build().is_ok(), "{:?}", cfg.build().err());
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.build().unwrap().kind(), cfg.build().unwrap().kind());
    }
}
