//! Command-line front end: file IO, config parsing and subcommands.

pub mod args;
pub mod commands;
pub mod error;
pub mod io;

use devar_core::bench::SweepKind;

use crate::args::{Cli, Command};
use crate::error::CliResult;

/// Runs a parsed invocation and returns the stdout document.
pub fn run(cli: &Cli, threads: usize) -> CliResult<String> {
    match &cli.command {
        Command::Test(a) => commands::cmd_test(a),
        Command::Simulate(a) => commands::cmd_simulate(a),
        Command::Power(a) => commands::cmd_sweep(SweepKind::Power, a, threads),
        Command::Typei(a) => commands::cmd_sweep(SweepKind::TypeI, a, threads),
        Command::Theory(a) => commands::cmd_theory(a),
    }
}

/// Pins glibc's mmap threshold at 1 MiB so freed matrix buffers return to the
/// OS. The adaptive default moves large buffers onto the heap, and long sweeps
/// over big matrices then grow without bound through fragmentation.
pub fn pin_mmap_threshold() {
    #[cfg(all(target_os = "linux", target_env = "gnu"))]
    // SAFETY: mallopt only adjusts allocator tuning and is called before any
    // worker threads exist.
    unsafe {
        libc::mallopt(libc::M_MMAP_THRESHOLD, 1 << 20);
    }
}
