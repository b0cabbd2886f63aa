//! Holds the acceptance gate in `tests/acceptance.rs`. Kept as its own
//! package so the gate runs after every other test target.
