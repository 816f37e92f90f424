//! Command-line front end for the `gqsd` toolkit: configuration parsing,
//! subcommands and report formatting.

pub mod commands;
pub mod config;
pub mod output;
