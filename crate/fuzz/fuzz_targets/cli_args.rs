#![no_main]

use clap::Parser;
use cxrlabel::Cli;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    let args = std::iter::once("cxrlabel").chain(data.split('\0'));
    let _ = Cli::try_parse_from(args);
});
