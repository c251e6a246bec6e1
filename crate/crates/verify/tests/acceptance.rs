//! Runs criteria 1–12 in full mode and prints one line per criterion, followed
//! by the failing checks. Exits nonzero if any criterion fails or overruns its
//! runtime budget.

use std::process::ExitCode;

use mdmult::suite::{run_criterion, SuiteConfig, CRITERIA};

/// Wall-clock budgets in seconds; criteria 9–12 have none.
fn budget(id: u8) -> Option<f64> {
    match id {
        1 => Some(5.0),
        2 => Some(60.0),
        3 => Some(10.0),
        4 | 5 => Some(120.0),
        6 => Some(180.0),
        7 | 8 => Some(300.0),
        _ => None,
    }
}

fn main() -> ExitCode {
    let cfg = SuiteConfig {
        timing: true,
        ..SuiteConfig::default()
    };
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let mut report = run_criterion(id, &cfg);
        let secs = report.elapsed_ms.unwrap_or(0) as f64 / 1000.0;
        let overrun = budget(id).filter(|&b| secs >= b);
        if overrun.is_some() {
            report.passed = false;
        }
        println!("{}  [{secs:.2} s]", report.summary_line());
        if let Some(b) = overrun {
            println!("    runtime {secs:.2} s exceeds budget {b} s");
        }
        if let Some(e) = &report.error {
            println!("    error: {e}");
        }
        for c in report.checks.iter().filter(|c| !c.passed) {
            println!(
                "    {}: measured {:.3e}, limit {:.3e} over {} samples",
                c.name, c.measured, c.limit, c.samples
            );
        }
        if !report.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 12 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
