//! Soft optimum against the exhaustive optimum over deterministic maps.

use predictive_observer::optimizer::{exhaustive_best, optimize_soft, ExhaustiveObjective};
use predictive_observer::strategy::DEFAULT_ENUMERATION_CAP;
use predictive_observer::{HistoryView, OptimizerSettings, PredictiveJoint, Scenario};

fn main() -> predictive_observer::Result<()> {
    let beta = 8.0;
    let cases = [
        ("case A, M=2", Scenario::single_question(1), 2),
        ("case B, M=4", Scenario::orthogonal_pair(2), 4),
        (
            "60 degrees, M=4",
            Scenario::angled_pair(std::f64::consts::FRAC_PI_3, 1),
            4,
        ),
    ];
    for (name, scenario, m) in cases {
        let pj = PredictiveJoint::from_window(&scenario.window_joint()?, HistoryView::Full)?;
        let soft = optimize_soft(&pj, beta, &OptimizerSettings::new(m))?;
        let exact = exhaustive_best(
            &pj,
            m,
            ExhaustiveObjective::Lagrangian { beta },
            DEFAULT_ENUMERATION_CAP,
        )?;
        println!(
            "{name}: soft {:.9} (converged={}, {} iterations), exhaustive {:.9} over {} maps",
            soft.objective, soft.converged, soft.iterations, exact.point.objective, exact.searched
        );
    }
    Ok(())
}
