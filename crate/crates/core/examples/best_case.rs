//! When the next question always repeats the last one, the answers alone
//! carry a full predictive bit.

use predictive_observer::bound::predictive_cap_check;
use predictive_observer::{Scenario, Strategy};

fn main() -> predictive_observer::Result<()> {
    let scenario = Scenario::repeated_pair(2);
    let strategies = [
        Strategy::Nothing,
        Strategy::Window { k: 1, labeled: false },
        Strategy::Window { k: 2, labeled: false },
        Strategy::Window { k: 1, labeled: true },
    ];
    for s in &strategies {
        let r = scenario.analyze(s, None)?;
        println!(
            "{s:?}: i_pred={:.6} nostalgia={:.6}",
            r.i_pred.bits(),
            r.nostalgia.bits()
        );
    }
    let cap = predictive_cap_check(&scenario.window_joint()?, &scenario.process, &strategies)?;
    println!("H(A'|Q') = {}, best = {:?}", cap.cap, strategies[cap.best]);
    Ok(())
}
