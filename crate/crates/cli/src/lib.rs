//! Command-line front end: argument parsing, subcommands, report and plot
//! writers.

pub mod cli;
pub mod commands;
pub mod plot;
pub mod report;
