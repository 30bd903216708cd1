//! Prints one PASS/FAIL line per acceptance criterion and fails if any
//! criterion fails. Runs without the libtest harness so the lines always
//! appear in the output.

use std::process::ExitCode;
use std::time::Instant;

use ballgen_cli::acceptance::{line, run, KEYS};

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for number in 1..=KEYS.len() {
        if !filter.is_empty() && !filter.iter().any(|f| KEYS[number - 1].contains(f.as_str())) {
            continue;
        }
        let started = Instant::now();
        let outcome = run(number);
        println!("{}  [{:.1}s]", line(&outcome), started.elapsed().as_secs_f64());
        for (k, v) in &outcome.measured {
            println!("        {k} = {v:e}");
        }
        ran += 1;
        failed += usize::from(!outcome.passed);
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
