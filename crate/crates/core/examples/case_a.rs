//! One question asked over and over: a one-answer record predicts the next
//! answer perfectly, and longer records add nothing.

use predictive_observer::{Scenario, Strategy};

fn main() -> predictive_observer::Result<()> {
    let scenario = Scenario::single_question(4);
    println!("k  i_mem  i_pred  nostalgia");
    for k in 1..=4 {
        let r = scenario.analyze(&Strategy::Window { k, labeled: true }, None)?;
        println!(
            "{k}  {:.4} {:.4}  {:.4}",
            r.i_mem.bits(),
            r.i_pred.bits(),
            r.nostalgia.bits()
        );
    }
    let nothing = scenario.analyze(&Strategy::Nothing, Some(300.0))?;
    println!(
        "nothing: i_pred={} bound={} J",
        nothing.i_pred,
        nothing.bound_joules.unwrap_or_default()
    );
    Ok(())
}
