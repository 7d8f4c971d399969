//! Runs the analyze workflow on a scenario file, printing the report JSON.
//!
//! ```text
//! cargo run --example scenario_file -- crates/core/scenarios/case_b_unlabeled.json
//! ```

use std::path::PathBuf;

use predictive_observer::report::to_json;
use predictive_observer::workflow::{analysis, Prepared};

fn main() -> predictive_observer::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/case_b_labeled.json"));
    let prepared = Prepared::load(&path)?;
    let (a, _, _) = analysis(&prepared)?;
    print!("{}", to_json(&a.report)?);
    println!("{} / answer record states {:?}", a.strategy, a.answer_record_states);
    Ok(())
}
