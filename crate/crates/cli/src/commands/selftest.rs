use std::time::Instant;

use vpc_core::report::format_float;
use vpc_core::selftest::{builtin_checks, run_checks};

/// Prints the check table. Returns whether every check passed.
pub fn run() -> bool {
    let start = Instant::now();
    let outcomes = run_checks(&builtin_checks());
    let width = outcomes.iter().map(|o| o.name.len()).max().unwrap_or(0);
    println!(
        "{:<width$}  {:>10}  {:>12}  status",
        "check", "expected", "actual"
    );
    for o in &outcomes {
        let actual = match &o.actual {
            Ok(v) => format_float(*v),
            Err(e) => format!("error: {e}"),
        };
        let status = if o.passed() { "ok" } else { "FAIL" };
        println!(
            "{:<width$}  {:>10}  {:>12}  {status}",
            o.name,
            format_float(o.expected),
            actual
        );
    }
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    println!(
        "{} of {} checks passed in {:.2?}",
        outcomes.len() - failed,
        outcomes.len(),
        start.elapsed()
    );
    failed == 0
}
