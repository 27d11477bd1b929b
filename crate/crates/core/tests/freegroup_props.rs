mod common;

use hbgrowth::freegroup::{
    abelianization, apply_endo, compose_endos, determinant, induced_pi1_map, is_surjective, reduce_word, FreeEndomorphism,
    Letter, Word,
};
use hbgrowth::graph::{Graph, GraphMap};
use proptest::prelude::*;
use rand::Rng;

fn random_word(rng: &mut impl Rng, rank: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::new((0..len).map(|_| Letter::new(rng.gen_range(0..rank), rng.gen())).collect())
}

fn random_endo(rng: &mut impl Rng, rank: usize) -> FreeEndomorphism {
    FreeEndomorphism::new(rank, (0..rank).map(|_| random_word(rng, rank, 4)).collect()).unwrap()
}

fn matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

proptest! {
    #[test]
    fn reduction_is_idempotent(letters in prop::collection::vec((0usize..3, any::<bool>()), 0..30)) {
        let w = Word::new(letters.into_iter().map(|(g, i)| Letter::new(g, i)).collect());
        let r = reduce_word(&w, 3).unwrap();
        prop_assert!(r.is_reduced());
        prop_assert_eq!(reduce_word(&r, 3).unwrap(), r.clone());
        prop_assert_eq!(r.exponent_sums(3), w.exponent_sums(3));
    }

    #[test]
    fn display_parse_round_trip(letters in prop::collection::vec((0usize..4, any::<bool>()), 0..20)) {
        let w = Word::new(letters.into_iter().map(|(g, i)| Letter::new(g, i)).collect());
        prop_assert_eq!(Word::parse(&w.to_string(), 4).unwrap(), w);
    }
}

#[test]
fn composition_matches_nested_application() {
    let mut rng = common::rng(401);
    for k in 0..300 {
        let rank = 1 + k % 4;
        let (e1, e2) = (random_endo(&mut rng, rank), random_endo(&mut rng, rank));
        let w = random_word(&mut rng, rank, 8);
        let lhs = apply_endo(&compose_endos(&e1, &e2).unwrap(), &w).unwrap();
        let rhs = apply_endo(&e1, &apply_endo(&e2, &w).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn abelianization_is_multiplicative() {
    let mut rng = common::rng(402);
    for k in 0..300 {
        let rank = 1 + k % 4;
        let (e1, e2) = (random_endo(&mut rng, rank), random_endo(&mut rng, rank));
        let composite = abelianization(&compose_endos(&e1, &e2).unwrap());
        assert_eq!(composite, matmul(&abelianization(&e2), &abelianization(&e1)));
    }
}

#[test]
fn nielsen_products_are_automorphisms() {
    let mut rng = common::rng(403);
    for k in 0..200 {
        let rank = 1 + k % 4;
        let e = common::random_automorphism(&mut rng, rank, 1 + k % 10);
        assert!(is_surjective(&e), "{:?}", e.image_strings());
        assert_eq!(determinant(&abelianization(&e)).abs(), 1);
    }
}

#[test]
fn surjective_implies_unimodular() {
    let mut rng = common::rng(404);
    let mut positives = 0;
    for k in 0..2000 {
        let rank = 1 + k % 3;
        let e = random_endo(&mut rng, rank);
        if is_surjective(&e) {
            positives += 1;
            assert_eq!(determinant(&abelianization(&e)).abs(), 1, "{:?}", e.image_strings());
        }
    }
    assert!(positives > 20);
}

#[test]
fn proper_powers_are_not_surjective() {
    for k in 2..5 {
        let img = vec!["x1"; k].join(" ");
        let e = FreeEndomorphism::parse(&[img.as_str(), "x2"]).unwrap();
        assert!(!is_surjective(&e));
    }
    // unimodular abelianization but not onto: [x1, x2] commutator twist
    let e = FreeEndomorphism::parse(&["x1 x2 x1- x2- x1", "x2"]).unwrap();
    assert_eq!(determinant(&abelianization(&e)), 1);
    assert!(!is_surjective(&e));
}

#[test]
fn rose_maps_induce_their_own_images() {
    let g = Graph::rose(&["a", "b"]).unwrap();
    let f = GraphMap::from_images(&g, &[("a", "a b"), ("b", "~a")]).unwrap();
    let e = induced_pi1_map(&f, &[]).unwrap();
    assert_eq!(e.image_strings(), vec!["x1 x2", "x1-"]);
    assert!(is_surjective(&e));
}
