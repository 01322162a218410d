#![no_main]

use grained_cli::parse::{parse_alpha, AlphaSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    match parse_alpha(s) {
        Ok(AlphaSpec::Alpha(a)) | Ok(AlphaSpec::Exponent(a)) => assert!(a.is_finite()),
        Err(_) => {}
    }
});
