//! Library surface behind the `btsim` binary: run configuration,
//! CSV/manifest emission, and the subcommand drivers. Exposed so
//! integration tests can exercise the pieces directly.

pub mod commands;
pub mod config;
pub mod output;
