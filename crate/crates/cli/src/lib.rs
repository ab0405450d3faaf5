//! Command-line front end and local HTTP service for `dereflect-core`.
//!
//! The `dereflect` binary is a thin wrapper: argument definitions live in
//! [`config`], subcommand bodies in [`commands`], the `eval` CSV/table format
//! in [`report`] and the HTTP API in [`server`].

pub mod commands;
pub mod config;
pub mod report;
pub mod server;

use config::{Cli, Command};

/// Runs one parsed invocation. An error means at least one requested output
/// was not written.
pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Suppress(args) => commands::run_suppress(&args),
        Command::Synth(args) => commands::run_synth(&args),
        Command::Eval(args) => commands::run_eval(&args),
        Command::Bench(args) => commands::run_bench(&args),
        Command::Serve(args) => tokio::runtime::Runtime::new()?.block_on(server::serve(&args)),
    }
}
