//! Reports, sampling and the command-line frontend for `critheight-core`.

pub mod census;
pub mod cli;
pub mod format;
pub mod report;
pub mod sampling;
pub mod suites;
