//! Strategy-dependent lower bound on average dissipation per interaction.
//!
//! The bound is `k_B T ln2` times the nostalgia: the memory's information about
//! the past that carries no information about the next interaction.

use serde::{Deserialize, Serialize};

use crate::chain::{NEXT_ANSWER, NEXT_QUESTION};
use crate::error::{ObserverError, Result};
use crate::info::{conditional_mutual_information, entropy, mutual_information, BitsValue, NEGATIVE_SLACK};
use crate::joint::JointDistribution;
use crate::process::QuestionProcess;
use crate::strategy::{apply_strategy, Strategy, MEMORY};

/// Boltzmann constant in J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoReport {
    /// `I(M; history)`.
    pub i_mem: BitsValue,
    /// `I(M; (Q[t+1], A[t+1]))`.
    pub i_pred: BitsValue,
    pub nostalgia: BitsValue,
    pub bound_bits: BitsValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_joules: Option<f64>,
    pub memory_capacity_bits: f64,
}

impl InfoReport {
    /// Assembles a report from the two information terms.
    pub fn from_parts(i_mem: f64, i_pred: f64, memory_size: usize, temperature_kelvin: Option<f64>) -> Result<Self> {
        if let Some(t) = temperature_kelvin {
            if !(t.is_finite() && t > 0.0) {
                return Err(ObserverError::validation(format!(
                    "temperature_kelvin = {t} must be > 0"
                )));
            }
        }
        let i_mem = BitsValue::from_raw(i_mem)?;
        let i_pred = BitsValue::from_raw(i_pred)?;
        let nostalgia = BitsValue::from_raw(i_mem.bits() - i_pred.bits())?;
        Ok(InfoReport {
            i_mem,
            i_pred,
            nostalgia,
            bound_bits: nostalgia,
            bound_joules: temperature_kelvin.map(|t| dissipation_joules(nostalgia, t)),
            memory_capacity_bits: (memory_size as f64).log2(),
        })
    }
}

/// `k_B T ln2` per bit of nostalgia.
pub fn dissipation_joules(nostalgia: BitsValue, temperature_kelvin: f64) -> f64 {
    BOLTZMANN * temperature_kelvin * nostalgia.nats()
}

fn history_names(joint: &JointDistribution) -> Result<Vec<&str>> {
    for needed in [MEMORY, NEXT_QUESTION, NEXT_ANSWER] {
        joint.position(needed)?;
    }
    let history: Vec<&str> = joint
        .var_names()
        .into_iter()
        .filter(|n| ![MEMORY, NEXT_QUESTION, NEXT_ANSWER].contains(n))
        .collect();
    if history.is_empty() {
        return Err(ObserverError::validation("joint has no history variables"));
    }
    Ok(history)
}

/// Information terms and bound for a joint produced by [`apply_strategy`].
pub fn evaluate(joint_with_memory: &JointDistribution, temperature_kelvin: Option<f64>) -> Result<InfoReport> {
    let history = history_names(joint_with_memory)?;
    let i_mem = mutual_information(joint_with_memory, &[MEMORY], &history)?;
    let i_pred = mutual_information(joint_with_memory, &[MEMORY], &[NEXT_QUESTION, NEXT_ANSWER])?;
    if i_pred.bits() > i_mem.bits() + NEGATIVE_SLACK {
        return Err(ObserverError::validation(format!(
            "i_pred {} exceeds i_mem {}: memory is not a function of the past",
            i_pred, i_mem
        )));
    }
    let m = joint_with_memory.variable(MEMORY)?.size();
    InfoReport::from_parts(i_mem.bits(), i_pred.bits(), m, temperature_kelvin)
}

/// `I(M; (Q[t+1],A[t+1]) | history)`, zero when memory only reads the past.
pub fn markov_violation(joint_with_memory: &JointDistribution) -> Result<BitsValue> {
    let history = history_names(joint_with_memory)?;
    conditional_mutual_information(joint_with_memory, &[MEMORY], &[NEXT_QUESTION, NEXT_ANSWER], &history)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapReport {
    /// `H(A[t+1] | Q[t+1])`.
    pub cap: BitsValue,
    pub max_i_pred: BitsValue,
    /// Index of the strategy attaining `max_i_pred`.
    pub best: usize,
    /// `Some(i_pred <= cap <= 1 bit)` for IID schedules, `None` otherwise.
    pub holds: Option<bool>,
}

/// Largest predictive information over `strategies`, against the answer-entropy cap.
pub fn predictive_cap_check(
    window: &JointDistribution,
    process: &QuestionProcess,
    strategies: &[Strategy],
) -> Result<CapReport> {
    if strategies.is_empty() {
        return Err(ObserverError::validation("no strategies to check"));
    }
    let cap = BitsValue::from_raw(
        entropy(window, &[NEXT_QUESTION, NEXT_ANSWER])?.bits() - entropy(window, &[NEXT_QUESTION])?.bits(),
    )?;
    let mut best = (0, BitsValue::ZERO);
    for (i, s) in strategies.iter().enumerate() {
        let r = evaluate(&apply_strategy(s, window)?, None)?;
        if r.i_pred > best.1 {
            best = (i, r.i_pred);
        }
    }
    let holds = process
        .is_iid()
        .then(|| best.1.bits() <= cap.bits() + NEGATIVE_SLACK && cap.bits() <= 1.0 + NEGATIVE_SLACK);
    Ok(CapReport {
        cap,
        max_i_pred: best.1,
        best: best.0,
        holds,
    })
}
