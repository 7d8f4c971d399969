//! Qubit states on the Bloch ball and two-outcome projective measurements.
//!
//! A state is a real 3-vector `r` with `|r| <= 1`; measuring along a unit axis
//! `n` yields `+1` with probability `(1 + r.n) / 2`. After the measurement the
//! state is the pure eigenstate `+n` or `-n`.

use serde::{Deserialize, Serialize};

use crate::error::{ObserverError, Result};

/// Slack on `|r| <= 1` when building a state.
pub const STATE_NORM_SLACK: f64 = 1e-12;
/// Tolerance for the pure-state predicate and for programmatic axes.
pub const UNIT_TOLERANCE: f64 = 1e-9;
/// Tolerance for axes read from scenario files; they are renormalized.
pub const CONFIG_AXIS_TOLERANCE: f64 = 1e-6;

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(v: [f64; 3]) -> f64 {
    dot(v, v).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = [x, y, z];
        if v.iter().any(|c| !c.is_finite()) {
            return Err(ObserverError::validation("bloch vector has non-finite component"));
        }
        let n = norm(v);
        if n > 1.0 + STATE_NORM_SLACK {
            return Err(ObserverError::validation(format!("bloch vector norm {n} exceeds 1")));
        }
        Ok(BlochVector { x, y, z })
    }

    pub fn from_array(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }

    /// The maximally mixed state, the origin of the ball.
    pub fn mixed() -> Self {
        BlochVector { x: 0.0, y: 0.0, z: 0.0 }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        norm(self.as_array())
    }

    pub fn is_pure(&self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_TOLERANCE
    }
}

/// Unit measurement axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis([f64; 3]);

impl Axis {
    /// Accepts vectors within `1e-9` of unit norm and renormalizes them.
    pub fn new(v: [f64; 3]) -> Result<Self> {
        Self::with_tolerance(v, UNIT_TOLERANCE)
    }

    /// Looser acceptance used for axes typed into scenario files.
    pub fn from_config(v: [f64; 3]) -> Result<Self> {
        Self::with_tolerance(v, CONFIG_AXIS_TOLERANCE)
    }

    fn with_tolerance(v: [f64; 3], tol: f64) -> Result<Self> {
        let n = norm(v);
        if !n.is_finite() || (n - 1.0).abs() > tol {
            return Err(ObserverError::validation(format!(
                "axis {v:?} has norm {n}, expected 1 within {tol:e}"
            )));
        }
        Ok(Axis([v[0] / n, v[1] / n, v[2] / n]))
    }

    pub fn x() -> Self {
        Axis([1.0, 0.0, 0.0])
    }

    pub fn y() -> Self {
        Axis([0.0, 1.0, 0.0])
    }

    pub fn z() -> Self {
        Axis([0.0, 0.0, 1.0])
    }

    /// Axis in the x-z plane at polar angle `theta` from +z.
    pub fn polar(theta: f64) -> Self {
        Axis([theta.sin(), 0.0, theta.cos()])
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.0
    }

    pub fn negated(&self) -> Self {
        Axis([-self.0[0], -self.0[1], -self.0[2]])
    }

    pub fn dot(&self, other: &Axis) -> f64 {
        dot(self.0, other.0)
    }

    /// Angle between two axes in radians.
    pub fn angle_to(&self, other: &Axis) -> f64 {
        self.dot(other).clamp(-1.0, 1.0).acos()
    }
}

/// Binary measurement outcome. Serialized as `1` for `+1` and `0` for `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Answer {
    Minus,
    Plus,
}

impl Answer {
    pub const ALL: [Answer; 2] = [Answer::Minus, Answer::Plus];

    /// Dense index, equal to the serialized bit.
    pub fn index(self) -> usize {
        self.bit() as usize
    }

    pub fn bit(self) -> u8 {
        match self {
            Answer::Minus => 0,
            Answer::Plus => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Result<Self> {
        match bit {
            0 => Ok(Answer::Minus),
            1 => Ok(Answer::Plus),
            other => Err(ObserverError::validation(format!("answer bit {other} not in {{0,1}}"))),
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Answer::Minus
        } else {
            Answer::Plus
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Answer::Minus => -1.0,
            Answer::Plus => 1.0,
        }
    }
}

/// A labeled binary question: "is the spin up along `axis`?"
#[derive(Debug, Clone, PartialEq)]
pub struct Question {
    pub label: String,
    pub axis: Axis,
}

impl Question {
    pub fn new(label: impl Into<String>, axis: Axis) -> Result<Self> {
        let label = label.into();
        if label.is_empty() || label.chars().any(|c| c == ',' || c.is_whitespace()) {
            return Err(ObserverError::validation(format!(
                "question label {label:?} must be non-empty without commas or whitespace"
            )));
        }
        Ok(Question { label, axis })
    }
}

/// Checks that labels are unique across a question set.
pub fn validate_questions(questions: &[Question]) -> Result<()> {
    if questions.is_empty() {
        return Err(ObserverError::validation("questions: at least one question required"));
    }
    for (i, q) in questions.iter().enumerate() {
        if questions[..i].iter().any(|p| p.label == q.label) {
            return Err(ObserverError::validation(format!(
                "questions: duplicate label {:?}",
                q.label
            )));
        }
    }
    Ok(())
}

/// Probability of the `+1` outcome when measuring `state` along `axis`.
pub fn born_probability(state: &BlochVector, axis: &Axis) -> f64 {
    (0.5 * (1.0 + dot(state.as_array(), axis.as_array()))).clamp(0.0, 1.0)
}

/// Probability of a specific outcome.
pub fn outcome_probability(state: &BlochVector, axis: &Axis, outcome: Answer) -> f64 {
    let p = born_probability(state, axis);
    match outcome {
        Answer::Plus => p,
        Answer::Minus => 1.0 - p,
    }
}

/// Post-measurement state: `+axis` or `-axis`.
pub fn collapse(axis: &Axis, outcome: Answer) -> BlochVector {
    let n = match outcome {
        Answer::Plus => *axis,
        Answer::Minus => axis.negated(),
    };
    let [x, y, z] = n.as_array();
    BlochVector { x, y, z }
}

/// Probability of reproducing `outcome` when `axis` is measured twice in a row.
pub fn repeat_measurement_check(axis: &Axis, outcome: Answer) -> f64 {
    outcome_probability(&collapse(axis, outcome), axis, outcome)
}
