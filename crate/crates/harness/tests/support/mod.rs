#![allow(dead_code)]

use std::io::Write;

pub mod grids;
pub mod rs_oracle;
pub mod ucs;

/// Prints the one-line verdict for a criterion, then fails the test if it did not hold.
/// The line goes straight to stderr so it shows even when output is captured.
pub fn verdict(criterion: u32, ok: bool, detail: &str) {
    let line = format!(
        "criterion {criterion} {}: {detail}\n",
        if ok { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(ok, "criterion {criterion}: {detail}");
}
