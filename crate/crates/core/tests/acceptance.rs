//! One line per acceptance criterion; details follow each failing one.
//! Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use orthosym::verify::{run_suite, SUITES};

fn main() -> ExitCode {
    let start = Instant::now();
    let mut failed = 0;
    for (i, name) in SUITES.iter().enumerate() {
        let t = Instant::now();
        let result = run_suite(name).expect("listed suites exist");
        let status = if result.passed { "PASS" } else { "FAIL" };
        println!("criterion {} {:<20} {status}  ({:.2?})", i + 1, name, t.elapsed());
        if !result.passed {
            failed += 1;
            for c in result.checks.iter().filter(|c| !c.passed) {
                println!("    failed: {}", c.claim);
                for line in c.detail.lines() {
                    println!("        {line}");
                }
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.2?}",
        SUITES.len() - failed,
        SUITES.len(),
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
