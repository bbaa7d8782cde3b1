//! Prints one PASS/FAIL line per acceptance criterion and fails the run if
//! any criterion fails.

use std::time::Instant;

fn main() {
    let start = Instant::now();
    let mut failed = 0;
    for id in 1..=12 {
        let t = Instant::now();
        let r = qteich::acceptance::run_criterion(id);
        println!("{} [{:.2}s]", qteich::acceptance::format_line(&r), t.elapsed().as_secs_f64());
        failed += usize::from(!r.pass);
    }
    println!("{} of 12 criteria passed in {:.1}s", 12 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
