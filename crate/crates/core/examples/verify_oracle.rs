//! Chain window joints against brute-force trajectory trees.

use predictive_observer::oracle::{brute_force_joint, converged_tail, cross_validate};
use predictive_observer::{QuestionProcess, Scenario};

fn main() -> predictive_observer::Result<()> {
    let mut periodic = Scenario::orthogonal_pair(2);
    periodic.process = QuestionProcess::periodic(vec![0, 1, 1])?;
    periodic.name = "periodic".into();

    for s in [
        Scenario::single_question(1),
        Scenario::orthogonal_pair(2),
        Scenario::repeated_pair(2),
        periodic,
    ] {
        let lr = s.long_run()?;
        let tail = converged_tail(&s, lr.period)?;
        let dev = cross_validate(&s.window_joint()?, &tail.joint)?;
        println!(
            "{:<16} horizon {}, period {}, converged {}, max deviation {dev:.1e}",
            s.name, tail.horizon, lr.period, tail.converged
        );
    }

    let s = Scenario::orthogonal_pair(1);
    let tree = brute_force_joint(&s.questions, &s.process, &s.initial, 3)?;
    let pair = tree.joint.marginal(&["A1", "A2"])?;
    println!("P(A1, A2) over {} leaves: {:?}", tree.leaf_count, pair.probs());
    Ok(())
}
