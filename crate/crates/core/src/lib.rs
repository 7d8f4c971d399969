//! Observers of a questioned qubit: exact measurement chains, memory
//! strategies, the information they retain, and the dissipation bound
//! `k_B T ln2 (I_mem - I_pred)` that follows from their nostalgia.
//!
//! ```
//! use predictive_observer::{Scenario, Strategy};
//!
//! let report = Scenario::orthogonal_pair(2)
//!     .analyze(&Strategy::Window { k: 2, labeled: true }, None)
//!     .unwrap();
//! assert!((report.i_pred.bits() - 0.5).abs() < 1e-9);
//! assert!((report.nostalgia.bits() - 3.0).abs() < 1e-9);
//! ```

pub mod bound;
pub mod chain;
pub mod config;
pub mod error;
pub mod info;
pub mod joint;
pub mod optimizer;
pub mod oracle;
pub mod process;
pub mod qubit;
pub mod report;
pub mod scenario;
pub mod strategy;
pub mod workflow;

pub use bound::{evaluate, InfoReport};
pub use error::{ObserverError, Result};
pub use info::BitsValue;
pub use joint::{JointDistribution, Variable};
pub use optimizer::{HistoryView, OptimizerSettings, PredictiveJoint};
pub use process::QuestionProcess;
pub use qubit::{Answer, Axis, BlochVector, Question};
pub use scenario::Scenario;
pub use strategy::{KernelStrategy, Strategy};
