//! Full acceptance checklist: one PASS/FAIL line per criterion. Exits with
//! status 1 if any criterion fails.

use std::process::ExitCode;

use cml::acceptance::{run_suite, Status};
use cml::config::Level;

fn main() -> ExitCode {
    // `cargo test -- --list` and filters are meaningless for this target.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let cache = std::env::var_os("CML_CACHE_DIR").map(std::path::PathBuf::from);
    println!("acceptance: running 15 criteria at full scale");
    let outcomes = run_suite(Level::Full, cache.as_deref(), |o| println!("{}", o.line()));
    let passed = outcomes.iter().filter(|o| o.status == Status::Pass).count();
    let failed: Vec<u32> = outcomes.iter().filter(|o| o.status == Status::Fail).map(|o| o.id).collect();
    println!("acceptance: {passed} passed, {} failed {:?}", failed.len(), failed);
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
