//! Plug-in estimates from simulated windows against the exact tables.

use predictive_observer::oracle::monte_carlo_check;
use predictive_observer::{Scenario, Strategy};

fn main() -> predictive_observer::Result<()> {
    let scenario = Scenario::orthogonal_pair(2);
    let strategy = Strategy::Window { k: 2, labeled: true };
    let exact = scenario.analyze(&strategy, None)?;
    println!("exact i_pred = {:.6}", exact.i_pred.bits());
    for n in [10_000, 40_000, 160_000, 640_000] {
        let mc = monte_carlo_check(&scenario, &strategy, n, 7)?;
        println!(
            "N={n:>7}: i_pred = {:.6} +/- {:.6}",
            mc.estimate.i_pred.bits(),
            mc.standard_errors.i_pred
        );
    }
    Ok(())
}
