#![no_main]

use grained_cli::parse::{parse_expr, parse_f64, parse_u64};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|s: &str| {
    let _ = parse_expr(s);
    if let Ok(n) = parse_u64(s) {
        // an integer that parses must parse again from its own rendering
        assert_eq!(parse_u64(&n.to_string()).unwrap(), n);
    }
    if let Ok(v) = parse_f64(s) {
        assert!(v.is_finite());
    }
});
