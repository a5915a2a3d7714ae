//! Acceptance criteria for the workspace. The checks live in
//! `tests/acceptance.rs` and print one PASS/FAIL line each.
