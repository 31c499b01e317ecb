//! Command surface and structured reports for the balmoment suites.

pub mod commands;
pub mod report;
