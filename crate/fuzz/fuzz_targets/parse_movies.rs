#![no_main]

use libfuzzer_sys::fuzz_target;
use structured_bandit::ingest::{decode, parse_movies_str};

fuzz_target!(|data: &[u8]| {
    let parsed = parse_movies_str(&decode(data));
    assert!(parsed.items.len() + parsed.report.malformed == parsed.report.total);
    assert!(parsed.report.samples.len() <= parsed.report.malformed);
});
