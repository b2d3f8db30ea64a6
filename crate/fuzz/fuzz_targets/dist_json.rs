#![no_main]

use libfuzzer_sys::fuzz_target;
use pebblelab::pebbling::Distribution;

fuzz_target!(|data: &[u8]| {
    let Ok(d) = serde_json::from_slice::<Distribution>(data) else {
        return;
    };
    let json = serde_json::to_string(&d).expect("serializes");
    let back: Distribution = serde_json::from_str(&json).expect("parses back");
    assert_eq!(back, d);
    // Validation promised the total fits in u64.
    let _ = d.total();
});
