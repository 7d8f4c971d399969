//! Simulated question/answer strings.

use predictive_observer::Scenario;

fn main() -> predictive_observer::Result<()> {
    let case_a = Scenario::single_question(1).sample(10, 7)?;
    let mut csv = Vec::new();
    case_a.write_csv(&Scenario::single_question(1).questions, &mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));

    let case_b = Scenario::orthogonal_pair(1).sample(1_000_000, 7)?;
    println!("case B repeat rate over 1e6 steps: {:.4}", case_b.repeat_rate());
    Ok(())
}
