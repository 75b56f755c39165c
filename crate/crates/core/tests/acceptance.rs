//! Runs the claim ledger on the bundled context and prints one line per
//! criterion. C5 and C10 are known to disagree with their stated values; the
//! target fails if any other criterion fails or either of those starts passing.

use std::process::ExitCode;

use ellsurf::cli::context_file::default_context;
use ellsurf::relcan_ledger::{run_ledger, ClaimStatus};

const KNOWN_FAILURES: &[&str] = &["C5", "C10"];

fn main() -> ExitCode {
    let report = run_ledger(&default_context());
    let mut unexpected = Vec::new();
    for i in 1..=17 {
        let id = format!("C{i}");
        let Some(claim) = report.claim(&id) else {
            println!("{id:<4} MISSING");
            unexpected.push(id);
            continue;
        };
        let passed = claim.status == ClaimStatus::Pass;
        println!(
            "{id:<4} {}  {} (computed {}, expected {})",
            if passed { "PASS" } else { "FAIL" },
            claim.anchor,
            claim.computed,
            claim.expected
        );
        if passed == KNOWN_FAILURES.contains(&id.as_str()) {
            unexpected.push(id);
        }
    }
    let failed = report.failures();
    println!("acceptance: {} passed, {failed} failed", 17 - failed);
    if unexpected.is_empty() {
        println!("acceptance: failure set matches {KNOWN_FAILURES:?}");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected status for {unexpected:?}");
        ExitCode::FAILURE
    }
}
