#![no_main]
use libfuzzer_sys::fuzz_target;

use hbgrowth::freegroup::induced_pi1_map;
use hbgrowth::graph::{compose_maps, incidence_matrix, validate_graph};
use hbgrowth::schema::{parse_document, Document};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    match parse_document(text) {
        Ok(Document::Graph(d)) => {
            let report = validate_graph(&d.data());
            assert_eq!(report.is_ok(), d.graph().is_ok());
        }
        Ok(Document::GraphMap(d)) => {
            let _ = validate_graph(&d.source);
            let Ok(f) = d.map() else { return };
            if f.edge_map().iter().map(|p| p.len()).sum::<usize>() > 64 {
                return;
            }
            if let Ok(m) = incidence_matrix(&f) {
                let ff = compose_maps(&f, &f, false).unwrap();
                let square = m.checked_mul(&m);
                if let Ok(sq) = square {
                    assert_eq!(incidence_matrix(&ff).unwrap(), sq);
                }
                if let Ok(tree) = d.tree(f.source()) {
                    let _ = induced_pi1_map(&f, &tree);
                }
            }
        }
        _ => {}
    }
});
