//! One pass/fail line per acceptance criterion.
//!
//! `STOCHGRAPH_ACCEPT_SCALE` scales every trial count (default 1).

use std::process::ExitCode;

use stochgraph::harness::{run_acceptance, AcceptOptions};

fn main() -> ExitCode {
    let scale = std::env::var("STOCHGRAPH_ACCEPT_SCALE")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(1.0);
    let opts = AcceptOptions {
        scale,
        ..AcceptOptions::default()
    };
    let mut failed = 0;
    for (c, res) in run_acceptance(&opts) {
        match res {
            Ok(o) => {
                if !o.passed {
                    failed += 1;
                }
                println!(
                    "criterion {:>2} {:<34} {} ({:.1} s) {}",
                    c.id,
                    c.name,
                    if o.passed { "PASS" } else { "FAIL" },
                    o.elapsed.as_secs_f64(),
                    o.summary
                );
            }
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} {:<34} FAIL error: {e}", c.id, c.name);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", 10 - failed, 10);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
