//! Two orthogonal questions in random order: the two-answer record with and
//! without the question labels.

use predictive_observer::strategy::answer_record_states;
use predictive_observer::{Scenario, Strategy};

fn main() -> predictive_observer::Result<()> {
    let scenario = Scenario::orthogonal_pair(2);
    let window = scenario.window_joint()?;
    println!("answer records that occur: {}", answer_record_states(&window, 2)?);

    for labeled in [true, false] {
        let r = scenario.analyze(&Strategy::Window { k: 2, labeled }, Some(300.0))?;
        println!(
            "{:<9} i_mem={:.6} i_pred={:.6} nostalgia={:.6} bound={:.3e} J",
            if labeled { "labeled" } else { "unlabeled" },
            r.i_mem.bits(),
            r.i_pred.bits(),
            r.nostalgia.bits(),
            r.bound_joules.unwrap_or_default(),
        );
    }
    Ok(())
}
