//! JSON experiment configs.
//!
//! One document describes one experiment. The `kind` tag selects the
//! experiment and the remaining fields are named after the model types:
//!
//! ```json
//! { "kind": "railroad", "s1_position": -1.0, "s2_position": 1.0, "r": 0.75,
//!   "pointer": "cauchy:0,1", "simulation": { "n": 100000, "seed": 7 } }
//! ```

use std::fmt;
use std::path::Path;

use ebt_core::montecarlo::DEFAULT_PARTITION_SIZE;
use ebt_core::pointer::{ParameterDistribution, PointerDistribution};
use ebt_core::scenarios::{
    CoinBagRealization, CoinBagScenario, EnvelopeScenario, PointerModel, RailroadScenario,
    Scenario, WilloughbyScenario,
};
use ebt_core::{Strategy, TrialSpec};
use serde::{Deserialize, Serialize};

/// A config field that failed to parse or validate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl fmt::Display) -> Self {
        ConfigError {
            field: field.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.field, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeConfig {
    pub weight: f64,
    pub success_prob: f64,
}

fn default_full_line_pointer() -> String {
    PointerDistribution::default().to_string()
}

fn default_envelope_pointer() -> String {
    "exponential:1".to_owned()
}

fn default_parameter_sampler() -> [String; 2] {
    let d = ParameterDistribution::default().to_string();
    [d.clone(), d]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelConfig {
    #[default]
    Position,
    Mass,
    Time,
}

impl From<ModelConfig> for PointerModel {
    fn from(m: ModelConfig) -> Self {
        match m {
            ModelConfig::Position => PointerModel::Position,
            ModelConfig::Mass => PointerModel::Mass,
            ModelConfig::Time => PointerModel::Time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentKind {
    AbstractTrial {
        outcomes: Vec<OutcomeConfig>,
        y: Vec<f64>,
    },
    Envelope {
        small_amount: f64,
        large_amount: f64,
        #[serde(default = "default_envelope_pointer")]
        pointer: String,
    },
    Railroad {
        s1_position: f64,
        s2_position: f64,
        r: f64,
        #[serde(default = "default_full_line_pointer")]
        pointer: String,
    },
    Willoughby {
        west_station: f64,
        current_station: f64,
        east_station: f64,
        #[serde(default = "default_full_line_pointer")]
        pointer: String,
    },
    CoinBag {
        s1: f64,
        s2: f64,
        #[serde(default)]
        model: ModelConfig,
        #[serde(default = "default_parameter_sampler")]
        parameter_sampler: [String; 2],
        #[serde(default = "default_full_line_pointer")]
        pointer: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        realization: Option<RealizationConfig>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizationConfig {
    pub coin1_parameter: f64,
    pub coin2_parameter: f64,
}

fn default_n() -> u64 {
    100_000
}

fn default_partition_size() -> u64 {
    DEFAULT_PARTITION_SIZE
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationConfig {
    #[serde(default = "default_n")]
    pub n: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_partition_size")]
    pub partition_size: u64,
    /// Worker threads; does not affect results.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            n: default_n(),
            seed: None,
            partition_size: default_partition_size(),
            workers: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub param: String,
    pub values: Vec<f64>,
    #[serde(default)]
    pub simulate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

/// A validated experiment ready to analyze or simulate.
#[derive(Debug, Clone)]
pub enum Experiment {
    Abstract {
        trial: TrialSpec,
        strategy: Strategy,
    },
    Physical {
        scenario: Scenario,
        realization: Option<CoinBagRealization>,
    },
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Abstract { .. } => "abstract_trial",
            Experiment::Physical { scenario, .. } => match scenario {
                Scenario::Envelope(_) => "envelope",
                Scenario::Railroad(_) => "railroad",
                Scenario::Willoughby(_) => "willoughby",
                Scenario::CoinBag(_) => "coin_bag",
            },
        }
    }
}

fn pointer(field: &str, spec: &str) -> Result<PointerDistribution, ConfigError> {
    spec.parse().map_err(|e| ConfigError::new(field, e))
}

fn scenario_error(e: ebt_core::Error) -> ConfigError {
    // Scenario messages already name the offending fields.
    ConfigError::new("", e)
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::new("config", e))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("--config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every invariant and builds the experiment.
    pub fn build(&self) -> Result<Experiment, ConfigError> {
        if self.simulation.n == 0 {
            return Err(ConfigError::new("simulation.n", "must be at least 1"));
        }
        if self.simulation.partition_size == 0 {
            return Err(ConfigError::new(
                "simulation.partition_size",
                "must be at least 1",
            ));
        }
        if self.simulation.workers == Some(0) {
            return Err(ConfigError::new("simulation.workers", "must be at least 1"));
        }
        match &self.experiment {
            ExperimentKind::AbstractTrial { outcomes, y } => {
                let raw: Vec<(f64, f64)> = outcomes
                    .iter()
                    .map(|o| (o.weight, o.success_prob))
                    .collect();
                let trial = TrialSpec::new(&raw).map_err(|e| ConfigError::new("", e))?;
                let strategy = Strategy::new(y.clone()).map_err(|e| ConfigError::new("", e))?;
                if strategy.len() != trial.len() {
                    return Err(ConfigError::new(
                        "y",
                        format!(
                            "has {} entries but outcomes has {}",
                            strategy.len(),
                            trial.len()
                        ),
                    ));
                }
                Ok(Experiment::Abstract { trial, strategy })
            }
            ExperimentKind::Envelope {
                small_amount,
                large_amount,
                pointer: p,
            } => {
                let sc =
                    EnvelopeScenario::new(*small_amount, *large_amount, pointer("pointer", p)?)
                        .map_err(scenario_error)?;
                Ok(Experiment::Physical {
                    scenario: Scenario::Envelope(sc),
                    realization: None,
                })
            }
            ExperimentKind::Railroad {
                s1_position,
                s2_position,
                r,
                pointer: p,
            } => {
                let sc =
                    RailroadScenario::new(*s1_position, *s2_position, *r, pointer("pointer", p)?)
                        .map_err(scenario_error)?;
                Ok(Experiment::Physical {
                    scenario: Scenario::Railroad(sc),
                    realization: None,
                })
            }
            ExperimentKind::Willoughby {
                west_station,
                current_station,
                east_station,
                pointer: p,
            } => {
                let sc = WilloughbyScenario::new(
                    *west_station,
                    *current_station,
                    *east_station,
                    pointer("pointer", p)?,
                )
                .map_err(scenario_error)?;
                Ok(Experiment::Physical {
                    scenario: Scenario::Willoughby(sc),
                    realization: None,
                })
            }
            ExperimentKind::CoinBag {
                s1,
                s2,
                model,
                parameter_sampler,
                pointer: p,
                realization,
            } => {
                let mut samplers = [ParameterDistribution::default(); 2];
                for (i, spec) in parameter_sampler.iter().enumerate() {
                    samplers[i] = spec
                        .parse()
                        .map_err(|e| ConfigError::new(format!("parameter_sampler[{i}]"), e))?;
                }
                let sc = CoinBagScenario::new(
                    *s1,
                    *s2,
                    (*model).into(),
                    samplers,
                    pointer("pointer", p)?,
                )
                .map_err(scenario_error)?;
                let realization = match realization {
                    Some(r) => {
                        let r = CoinBagRealization {
                            coin1_parameter: r.coin1_parameter,
                            coin2_parameter: r.coin2_parameter,
                        };
                        sc.strategy_for(&r)
                            .map_err(|e| ConfigError::new("realization", e))?;
                        Some(r)
                    }
                    None => None,
                };
                Ok(Experiment::Physical {
                    scenario: Scenario::CoinBag(sc),
                    realization,
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_abstract_trial() {
        let cfg = ExperimentConfig::from_json(
            r#"{"kind":"abstract_trial",
                "outcomes":[{"weight":0.2,"success_prob":0.3},{"weight":0.3,"success_prob":0.5},{"weight":0.5,"success_prob":0.7}],
                "y":[0.1,0.9,0.7],
                "simulation":{"n":10,"seed":3}}"#,
        )
        .unwrap();
        assert_eq!(cfg.simulation.partition_size, DEFAULT_PARTITION_SIZE);
        assert!(matches!(cfg.build().unwrap(), Experiment::Abstract { .. }));
    }

    #[test]
    fn weight_errors_name_the_field() {
        let cfg = ExperimentConfig::from_json(
            r#"{"kind":"abstract_trial","outcomes":[{"weight":0.5,"success_prob":0.4},{"weight":0.6,"success_prob":0.7}],"y":[0,1]}"#,
        )
        .unwrap();
        let err = cfg.build().unwrap_err().to_string();
        assert!(err.contains("outcomes[") && err.contains("weight"), "{err}");
    }

    #[test]
    fn defaults_fill_pointers() {
        let cfg =
            ExperimentConfig::from_json(r#"{"kind":"envelope","small_amount":1,"large_amount":2}"#)
                .unwrap();
        match &cfg.experiment {
            ExperimentKind::Envelope { pointer, .. } => assert_eq!(pointer, "exponential:1"),
            _ => unreachable!(),
        }
        let cfg =
            ExperimentConfig::from_json(r#"{"kind":"coin_bag","s1":0.25,"s2":0.75}"#).unwrap();
        assert!(cfg.build().is_ok());
    }

    #[test]
    fn bad_pointer_is_reported() {
        let cfg = ExperimentConfig::from_json(
            r#"{"kind":"railroad","s1_position":0,"s2_position":1,"r":0.7,"pointer":"normal:0,-1"}"#,
        )
        .unwrap();
        assert_eq!(cfg.build().unwrap_err().field, "pointer");
        let cfg = ExperimentConfig::from_json(
            r#"{"kind":"coin_bag","s1":0.25,"s2":0.75,"realization":{"coin1_parameter":0.1,"coin2_parameter":0.2}}"#,
        )
        .unwrap();
        assert_eq!(cfg.build().unwrap_err().field, "realization");
    }

    #[test]
    fn unknown_kind_fails() {
        assert!(ExperimentConfig::from_json(r#"{"kind":"dice"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"kind":"railroad","s1_position":0}"#).is_err());
    }
}
