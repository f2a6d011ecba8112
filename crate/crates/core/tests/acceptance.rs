//! Runs every acceptance criterion at its stated tolerance and prints one
//! line per criterion. Exits non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use ri2d_core::lattice::LatticePoint;
use ri2d_core::verify::{Check, Suite, Verifier, VerifyConfig};

fn rational_oracle(v: &Verifier) -> Check {
    let exact = common::exact_kernel(12);
    let mut worst: f64 = 0.0;
    for (x, col) in exact.iter().enumerate() {
        for (y, e) in col.iter().enumerate() {
            let got = v.kernel().potential(LatticePoint::new(x as i64, y as i64));
            worst = worst.max((got - e.to_f64()).abs());
        }
    }
    Check::at_most("kernel vs exact rational recursion on [0,12]^2", worst, 1e-9)
}

fn main() -> ExitCode {
    let verifier = Verifier::new(VerifyConfig::default()).expect("kernel builds");
    let mut all = true;
    for id in Suite::All.criteria() {
        let t = Instant::now();
        let mut outcome = verifier.run_criterion(id);
        if id == 1 {
            let c = rational_oracle(&verifier);
            outcome.passed &= c.passed;
            outcome.checks.push(c);
        }
        all &= outcome.passed;
        println!(
            "{} criterion {:>2}: {} ({} checks, {} comparisons, {:.1}s)",
            if outcome.passed { "PASS" } else { "FAIL" },
            id,
            outcome.title,
            outcome.checks.len(),
            outcome.comparisons.len(),
            t.elapsed().as_secs_f64()
        );
        for c in &outcome.checks {
            println!(
                "       {} {} = {:.6e} in [{:.6e}, {:.6e}]",
                if c.passed { "ok  " } else { "FAIL" },
                c.name,
                c.observed,
                c.low,
                c.high
            );
        }
        for c in &outcome.comparisons {
            println!(
                "       {} {}: predicted {:.6}, observed {:.6} [{:.6}, {:.6}], slack {}",
                if c.passed() { "ok  " } else { "FAIL" },
                c.name,
                c.predicted,
                c.estimate.mean,
                c.estimate.ci_low,
                c.estimate.ci_high,
                c.slack
            );
        }
        for n in &outcome.notes {
            println!("       note: {n}");
        }
        if let Some(e) = &outcome.error {
            println!("       error: {e}");
        }
    }
    println!("acceptance: {}", if all { "all criteria passed" } else { "FAILURES" });
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
