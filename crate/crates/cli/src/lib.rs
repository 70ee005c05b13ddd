//! Library half of the `dado` binary: flag parsing, script execution,
//! statistics rendering, and the scaling benchmark. Kept as a library so
//! integration tests can drive the same code paths the binary uses.

pub mod args;
pub mod bench;
pub mod run;
pub mod stats;
