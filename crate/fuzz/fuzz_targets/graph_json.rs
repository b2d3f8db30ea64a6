#![no_main]

use libfuzzer_sys::fuzz_target;
use pebblelab::graph::Graph;

fuzz_target!(|data: &[u8]| {
    let Ok(g) = serde_json::from_slice::<Graph>(data) else {
        return;
    };
    // Accepted graphs are simple and connected; shape detection is part of
    // equality, so the round trip checks it too.
    let json = serde_json::to_string(&g).expect("serializes");
    let back: Graph = serde_json::from_str(&json).expect("parses back");
    assert_eq!(back, g);
    for v in 1..=g.n() {
        for &w in g.neighbors(v) {
            assert_ne!(v, w);
            assert!(g.neighbors(w).contains(&v));
        }
    }
});
