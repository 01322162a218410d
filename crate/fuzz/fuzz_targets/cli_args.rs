#![no_main]

use clap::Parser;
use grained_cli::Cli;
use libfuzzer_sys::fuzz_target;

// Argument parsing only; commands are never run.
fuzz_target!(|s: &str| {
    let args = std::iter::once("grained").chain(s.split_whitespace());
    let _ = Cli::try_parse_from(args);
});
