#![no_main]
use libfuzzer_sys::fuzz_target;

use hbgrowth::freegroup::{abelianization, determinant, is_surjective, reduce_word, FreeEndomorphism, Word};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(w) = Word::parse(text, 4) {
        let r = reduce_word(&w, 4).unwrap();
        assert!(r.is_reduced());
        assert_eq!(Word::parse(&w.to_string(), 4).unwrap(), w);
    }
    // lines as generator images
    let images: Vec<&str> = text.lines().take(4).collect();
    if images.is_empty() {
        return;
    }
    if let Ok(e) = FreeEndomorphism::parse(&images) {
        if is_surjective(&e) {
            assert_eq!(determinant(&abelianization(&e)).abs(), 1);
        }
    }
});
