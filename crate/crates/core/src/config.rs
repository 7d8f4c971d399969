//! JSON scenario files.
//!
//! ```json
//! {
//!   "name": "case_b_labeled",
//!   "questions": [{"label": "Q1", "axis": [0, 0, 1]}, {"label": "Q2", "axis": [1, 0, 0]}],
//!   "process": {"type": "iid", "weights": [0.5, 0.5]},
//!   "initial_state": [0, 0, 0],
//!   "window": 2,
//!   "strategy": {"type": "window", "k": 2, "labeled": true},
//!   "optimizer": {"memory_size": 4},
//!   "temperature_kelvin": 300
//! }
//! ```
//!
//! Unknown keys are rejected at every level. Errors name the offending field.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{ObserverError, Result};
use crate::optimizer::{HistoryView, OptimizerSettings};
use crate::process::QuestionProcess;
use crate::qubit::{Axis, BlochVector, Question};
use crate::scenario::Scenario;
use crate::strategy::{HistoryLayout, KernelStrategy, Strategy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuestionConfig {
    pub label: String,
    pub axis: [f64; 3],
}

/// Question schedule; periodic sequences are written with question labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessConfig {
    Iid {
        weights: Vec<f64>,
    },
    Markov {
        transition: Vec<Vec<f64>>,
        initial: Vec<f64>,
    },
    Periodic {
        sequence: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StrategyConfig {
    Window {
        k: usize,
        #[serde(default = "yes")]
        labeled: bool,
    },
    Nothing,
    /// Kernel CSV, relative to the config file.
    Kernel {
        path: PathBuf,
    },
}

fn yes() -> bool {
    true
}

/// Optimizer settings plus the part of the history the strategy may read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub memory_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub history: HistoryView,
}

impl OptimizerConfig {
    pub fn settings(&self) -> Result<OptimizerSettings> {
        let d = OptimizerSettings::new(self.memory_size);
        let s = OptimizerSettings {
            memory_size: self.memory_size,
            beta_min: self.beta_min.unwrap_or(d.beta_min),
            beta_max: self.beta_max.unwrap_or(d.beta_max),
            beta_steps: self.beta_steps.unwrap_or(d.beta_steps),
            tolerance: self.tolerance.unwrap_or(d.tolerance),
            max_iterations: self.max_iterations.unwrap_or(d.max_iterations),
            restarts: self.restarts.unwrap_or(d.restarts),
            seed: self.seed.unwrap_or(d.seed),
        };
        s.validate()?;
        Ok(s)
    }
}

/// Axis angles at which `analyze` re-evaluates the scenario with the second
/// question rotated away from the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub angles_deg: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub questions: Vec<QuestionConfig>,
    pub process: ProcessConfig,
    #[serde(default = "mixed")]
    pub initial_state: [f64; 3],
    pub window: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature_kelvin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

fn mixed() -> [f64; 3] {
    [0.0, 0.0, 0.0]
}

fn at(field: &str, e: ObserverError) -> ObserverError {
    match e {
        ObserverError::Validation(msg) if msg.starts_with(field) => ObserverError::Validation(msg),
        ObserverError::Validation(msg) => ObserverError::Validation(format!("{field}: {msg}")),
        other => other,
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            ObserverError::validation(format!("{path}: {}", e.into_inner()))
        })
    }

    /// Reads and validates a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ObserverError::io(path, e))?;
        let config = Self::from_json(&text)?;
        config.scenario()?;
        Ok(config)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn question_set(&self) -> Result<Vec<Question>> {
        self.questions
            .iter()
            .enumerate()
            .map(|(i, q)| {
                let axis = Axis::from_config(q.axis).map_err(|e| at(&format!("questions[{i}].axis"), e))?;
                Question::new(q.label.clone(), axis).map_err(|e| at(&format!("questions[{i}].label"), e))
            })
            .collect()
    }

    pub fn question_process(&self, questions: &[Question]) -> Result<QuestionProcess> {
        let p = match &self.process {
            ProcessConfig::Iid { weights } => QuestionProcess::iid(weights.clone()),
            ProcessConfig::Markov { transition, initial } => {
                QuestionProcess::markov(transition.clone(), initial.clone())
            }
            ProcessConfig::Periodic { sequence } => {
                let indices = sequence
                    .iter()
                    .enumerate()
                    .map(|(i, label)| {
                        questions.iter().position(|q| &q.label == label).ok_or_else(|| {
                            ObserverError::validation(format!("process.sequence[{i}]: unknown question {label:?}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                QuestionProcess::periodic(indices)
            }
        }
        .map_err(|e| at("process", e))?;
        p.validate_for(questions.len()).map_err(|e| at("process", e))?;
        Ok(p)
    }

    /// The validated scenario.
    pub fn scenario(&self) -> Result<Scenario> {
        let questions = self.question_set()?;
        let process = self.question_process(&questions)?;
        let initial = BlochVector::from_array(self.initial_state).map_err(|e| at("initial_state", e))?;
        if self.window == 0 {
            return Err(ObserverError::validation("window: must be >= 1"));
        }
        if let Some(t) = self.temperature_kelvin {
            if !(t.is_finite() && t > 0.0) {
                return Err(ObserverError::validation(format!(
                    "temperature_kelvin: {t} must be > 0"
                )));
            }
        }
        if let Some(opt) = &self.optimizer {
            opt.settings().map_err(|e| at("optimizer", e))?;
            if let HistoryView::Window { k, .. } = opt.history {
                if k == 0 || k > self.window {
                    return Err(ObserverError::validation(format!(
                        "optimizer.history.k: {k} must be in 1..={}",
                        self.window
                    )));
                }
            }
        }
        if let Some(sweep) = &self.sweep {
            if self.questions.len() != 2 {
                return Err(ObserverError::validation("sweep: needs exactly two questions"));
            }
            if sweep.angles_deg.iter().any(|a| !a.is_finite()) {
                return Err(ObserverError::validation("sweep.angles_deg: angles must be finite"));
            }
        }
        if let Some(StrategyConfig::Window { k, .. }) = &self.strategy {
            if *k == 0 || *k > self.window {
                return Err(ObserverError::validation(format!(
                    "strategy.k: {k} must be in 1..={}",
                    self.window
                )));
            }
        }
        let mut scenario = Scenario::new(self.name.clone(), questions, process, initial, self.window)?;
        scenario.name = self.name.clone();
        Ok(scenario)
    }

    /// The configured strategy; kernel paths resolve against `base_dir`.
    pub fn strategy(&self, base_dir: &Path) -> Result<Option<Strategy>> {
        let Some(cfg) = &self.strategy else { return Ok(None) };
        let s = match cfg {
            StrategyConfig::Window { k, labeled } => Strategy::Window {
                k: *k,
                labeled: *labeled,
            },
            StrategyConfig::Nothing => Strategy::Nothing,
            StrategyConfig::Kernel { path } => {
                let full = base_dir.join(path);
                let file = std::fs::File::open(&full).map_err(|e| ObserverError::io(&full, e))?;
                let questions = self.question_set()?;
                let kernel =
                    KernelStrategy::read_csv(file, &questions, self.window).map_err(|e| at("strategy.path", e))?;
                Strategy::Kernel(kernel)
            }
        };
        s.validate_for(&HistoryLayout::new(self.questions.len(), self.window)?)
            .map_err(|e| at("strategy", e))?;
        Ok(Some(s))
    }
}
