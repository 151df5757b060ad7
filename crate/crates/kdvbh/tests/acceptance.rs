//! The ten acceptance criteria, one PASS/FAIL line each.

use std::process::ExitCode;
use std::time::Instant;

use kdvbh::acceptance::{Battery, ALLOWED_MISMATCHES, TOLERANCE};

fn main() -> ExitCode {
    let start = Instant::now();
    let battery = Battery::default();
    println!("acceptance battery (tolerance {TOLERANCE}, {ALLOWED_MISMATCHES} mismatches allowed)");
    let results = battery.run_all();
    for c in &results {
        println!("{c}");
    }
    let failed = results.iter().filter(|c| !c.passed()).count();
    println!("{} of {} criteria passed in {:.1?}", results.len() - failed, results.len(), start.elapsed());
    assert_eq!(results.len(), 10);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
