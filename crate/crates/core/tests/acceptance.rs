//! Runs every acceptance check and prints one PASS/FAIL line per check.
//! Numeric arguments restrict the run to those ids.

use std::process::ExitCode;

use arithstat::acceptance;

fn main() -> ExitCode {
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (id, _) in acceptance::CRITERIA {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let outcome = acceptance::run(id);
        println!("{outcome}");
        ran += 1;
        failed += usize::from(!outcome.passed);
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
