#![no_main]

use cylris::harness::lists::{format_list, parse_f64_list, parse_usize_list};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(v) = parse_f64_list(text) {
        assert_eq!(parse_f64_list(&format_list(&v)).unwrap(), v);
    }
    if let Ok(v) = parse_usize_list(text) {
        assert_eq!(parse_usize_list(&format_list(&v)).unwrap(), v);
    }
});
