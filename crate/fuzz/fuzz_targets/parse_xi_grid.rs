#![no_main]

use grained_cli::parse::parse_xi_grid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    if let Ok(g) = parse_xi_grid(s) {
        assert!(!g.is_empty());
        assert!(g.iter().all(|v| v.is_finite()));
    }
});
