#![no_main]
use libfuzzer_sys::fuzz_target;

use hbgrowth::graph::{free_reduce_path, Graph};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let g = Graph::new(&["u", "w"], &[("a", "u", "u"), ("t", "u", "w"), ("b", "w", "w")]).unwrap();
    let Ok(p) = g.parse_path(text) else { return };
    let _ = g.check_path(&p);
    if let Ok(r) = free_reduce_path(&g, &p) {
        assert!(r.len() <= p.len());
        assert_eq!(g.parse_path(&g.format_path(&r)).unwrap(), r);
    }
});
