#![no_main]

//! Input: command-line arguments separated by NUL bytes.

use clap::Parser;
use eulerist_cli::Cli;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let args = std::iter::once("eulerist").chain(text.split('\0'));
    if let Ok(cli) = Cli::try_parse_from(args) {
        let _ = cli.to_args();
        let _ = cli.to_json();
    }
});
