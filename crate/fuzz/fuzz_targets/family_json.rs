#![no_main]

use libfuzzer_sys::fuzz_target;
use pebblelab::multiset::LevelFamily;
use pebblelab::shadow::{fully_compress, is_compressed, layer_partition, shadow};

fuzz_target!(|data: &[u8]| {
    let Ok(fam) = serde_json::from_slice::<LevelFamily>(data) else {
        return;
    };
    // Anything accepted must round-trip exactly.
    let json = serde_json::to_string(&fam).expect("serializes");
    let back: LevelFamily = serde_json::from_str(&json).expect("parses back");
    assert_eq!(back, fam);

    // Cheap structural oracles, kept to sizes where they are instant.
    if fam.ground_size() > 6 || fam.level() > 6 || fam.len() > 32 {
        return;
    }
    let layer_total: usize = layer_partition(&fam)
        .expect("valid family partitions")
        .iter()
        .map(|l| l.len())
        .sum();
    assert_eq!(layer_total, fam.len());
    let q = fully_compress(&fam);
    assert_eq!(q.len(), fam.len());
    assert!(is_compressed(&q));
    if fam.level() >= 1 {
        let before = shadow(&fam).expect("shadow exists").len();
        let after = shadow(&q).expect("shadow exists").len();
        assert!(after <= before);
    }
});
