//! File formats, commands and verification reports for the `ncflow` binary.

pub mod commands;
pub mod dump;
pub mod format;
