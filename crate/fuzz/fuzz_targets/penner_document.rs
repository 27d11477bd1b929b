#![no_main]
use libfuzzer_sys::fuzz_target;

use hbgrowth::penner::{build_boundary_pair, penner_product, validate_pair, DualArc};
use hbgrowth::schema::parse_penner;
use hbgrowth::spectral::PfOptions;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(doc) = parse_penner(text) else { return };
    let Ok(pair) = doc.pair() else { return };
    if pair.curve_count() > 12 {
        return;
    }
    let report = validate_pair(&pair);
    let _ = report.status();
    if let Some(word) = &doc.word {
        if word.letters.len() <= 16 {
            let opts = PfOptions { max_iter: 2_000, ..PfOptions::default() };
            if let Ok(p) = penner_product(&pair, word, opts) {
                assert!(p.lambda_boundary >= 1.0 - 1e-9);
            }
        }
    }
    let gamma = pair.curves().next().cloned();
    if let Some(gamma) = gamma {
        if let Ok(b) = build_boundary_pair(&pair, &DualArc::new(&gamma)) {
            if report.necessary_checks_pass() {
                assert!(validate_pair(&b.pair).necessary_checks_pass());
            }
        }
    }
});
