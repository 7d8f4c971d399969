//! Soft-optimizer beta sweep for Case B with four memory states, written as CSV.

use predictive_observer::optimizer::{sweep_beta, write_frontier_csv};
use predictive_observer::{HistoryView, OptimizerSettings, PredictiveJoint, Scenario};

fn main() -> predictive_observer::Result<()> {
    let window = Scenario::orthogonal_pair(2).window_joint()?;
    let pj = PredictiveJoint::from_window(&window, HistoryView::Full)?;
    let settings = OptimizerSettings {
        beta_steps: 13,
        ..OptimizerSettings::new(4)
    };
    let points = sweep_beta(&pj, &settings)?;
    write_frontier_csv(&points, std::io::stdout().lock())?;

    let last = points.last().expect("non-empty sweep");
    eprintln!(
        "beta={} strategy: {}",
        last.beta,
        predictive_observer::strategy::strategy_summary(&predictive_observer::Strategy::Kernel(last.strategy.clone()),)
    );
    Ok(())
}
