//! Run the full check sweep on one instance and print its canonical JSON report.

use qlsplab::json::to_canonical;
use qlsplab::pipeline::{verify_all, Level, Status, VerifyOptions};

fn main() -> qlsplab::Result<()> {
    let report = verify_all(6, 3, 2024, Level::Full, &VerifyOptions::default())?;
    for (name, check) in &report.checks {
        let tag = match check.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skip",
        };
        println!("{tag}  {name}");
    }
    println!("passed: {}", report.passed);
    println!("{}", to_canonical(&report)?);
    Ok(())
}
