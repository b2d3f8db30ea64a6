#![no_main]

use libfuzzer_sys::fuzz_target;
use pebblelab::multiset::Multiset;

fuzz_target!(|data: &[u8]| {
    let Ok(m) = serde_json::from_slice::<Multiset>(data) else {
        return;
    };
    let json = serde_json::to_string(&m).expect("serializes");
    let back: Multiset = serde_json::from_str(&json).expect("parses back");
    assert_eq!(back, m);
    // size() summed fine during validation, so it must not overflow here.
    let _ = m.size();
    assert_eq!(m.counts().len(), m.ground_size());
});
