//! Holds the `acceptance` test target (`cargo test -p fpp-validation`).
//!
//! The suite lives in its own package so that, in a workspace run, it comes
//! after the unit and integration tests of the other crates: a failing
//! criterion then does not keep them from running.
