//! At beta = 1 doing nothing and remembering the last answer both cost nothing.

use predictive_observer::optimizer::{degeneracy_members, optimize_soft};
use predictive_observer::{HistoryView, OptimizerSettings, PredictiveJoint, Scenario};

fn main() -> predictive_observer::Result<()> {
    let window = Scenario::single_question(1).window_joint()?;
    let pj = PredictiveJoint::from_window(&window, HistoryView::Full)?;

    let soft = optimize_soft(&pj, 1.0, &OptimizerSettings::new(2))?;
    println!("soft optimum at beta=1: objective={:.2e}", soft.objective);

    for m in degeneracy_members(&pj, 2)? {
        let kind = if m.observer_like { "observer" } else { "non-observer" };
        println!(
            "map {:?}: i_pred={} nostalgia={} ({kind})",
            m.map, m.i_pred, m.nostalgia
        );
    }
    Ok(())
}
