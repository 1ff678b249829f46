//! Acceptance gate: one line per criterion, all must pass.

use monopole::config::{CommandKind, RunConfig};
use monopole::verify::run_battery;

#[test]
fn acceptance_criteria() {
    let cfg = RunConfig::defaults(CommandKind::Verify);
    let results = run_battery(&cfg);
    assert_eq!(results.len(), 10);
    for c in &results {
        println!("{c}");
    }
    let failed: Vec<u8> = results.iter().filter(|c| !c.passed).map(|c| c.id).collect();
    println!("{}/{} criteria passed", results.len() - failed.len(), results.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
