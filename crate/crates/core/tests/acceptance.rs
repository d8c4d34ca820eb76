//! One line per acceptance criterion. Fails (nonzero exit) if any criterion
//! fails or runs over its time budget.

use std::process::ExitCode;
use std::time::Instant;

use mixdih_core::report::{criteria, Built, Options};

fn main() -> ExitCode {
    let clock = Instant::now();
    let built = match Built::new() {
        Ok(b) => b,
        Err(e) => {
            println!("FAIL build: {e}");
            return ExitCode::FAILURE;
        }
    };
    println!("built h56, p59, toy2 in {:.3}s", clock.elapsed().as_secs_f64());
    let opts = Options::default();
    let mut failed = 0;
    for c in criteria() {
        let clock = Instant::now();
        let check = (c.run)(&built, &opts);
        let secs = clock.elapsed().as_secs_f64();
        let (passed, detail) = match check {
            Ok(check) => (check.passed, check.actual),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_budget = secs <= c.budget_secs;
        let status = if passed && in_budget { "PASS" } else { "FAIL" };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "{status} [{:>2}] {:<24} {:>8.3}s (budget {}s) {}",
            c.id, c.name, secs, c.budget_secs, detail
        );
    }
    println!("{} of {} criteria passed", criteria().len() - failed, criteria().len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
