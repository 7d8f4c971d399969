//! Predictive information of a labeled one-step record as the second
//! question's axis turns away from the first.

use predictive_observer::workflow::angle_closed_form;
use predictive_observer::{Scenario, Strategy};

fn main() -> predictive_observer::Result<()> {
    println!("theta_deg,i_pred_bits,closed_form");
    for deg in (0..=180).step_by(15) {
        let theta = f64::from(deg).to_radians();
        let r = Scenario::angled_pair(theta, 1).analyze(&Strategy::Window { k: 1, labeled: true }, None)?;
        println!("{deg},{:.9},{:.9}", r.i_pred.bits(), angle_closed_form(theta));
    }
    Ok(())
}
