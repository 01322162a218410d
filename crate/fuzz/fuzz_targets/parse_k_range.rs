#![no_main]

use grained_cli::parse::parse_k_range;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(ks) = parse_k_range(s) {
        assert!(!ks.is_empty());
        assert!(ks.windows(2).all(|w| w[0] < w[1]));
    }
});
