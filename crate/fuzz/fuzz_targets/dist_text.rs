#![no_main]

use libfuzzer_sys::fuzz_target;
use pebblelab::experiments::GraphFamily;
use pebblelab::pebbling::Distribution;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else {
        return;
    };
    // The two textual CLI decoders: count lists and family names.
    if let Ok(d) = s.parse::<Distribution>() {
        // Text and JSON forms must agree.
        let json = serde_json::to_string(&d).expect("serializes");
        let back: Distribution = serde_json::from_str(&json).expect("parses back");
        assert_eq!(back, d);
        assert!(d.n() > 0);
    }
    let _ = s.parse::<GraphFamily>();
});
