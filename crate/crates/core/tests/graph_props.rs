mod common;

use std::collections::BTreeMap;

use hbgrowth::graph::{compose_maps, free_reduce_path, incidence_matrix, EdgePath, Graph, GraphData, GraphMap, Token};
use proptest::prelude::*;

fn rose3() -> Graph {
    Graph::rose(&["a", "b", "c"]).unwrap()
}

fn token_strategy() -> impl Strategy<Value = Token> {
    (0usize..3, any::<bool>()).prop_map(|(edge, reversed)| Token { edge, reversed })
}

proptest! {
    #[test]
    fn free_reduction_is_idempotent_and_shrinks(tokens in prop::collection::vec(token_strategy(), 0..40)) {
        let g = rose3();
        let p = EdgePath::new(tokens);
        let r = free_reduce_path(&g, &p).unwrap();
        prop_assert!(r.len() <= p.len());
        prop_assert!(r.is_reduced());
        prop_assert_eq!(free_reduce_path(&g, &r).unwrap(), r.clone());
        prop_assert_eq!((p.len() - r.len()) % 2, 0);
    }

    #[test]
    fn reduction_commutes_with_reversal(tokens in prop::collection::vec(token_strategy(), 0..30)) {
        let g = rose3();
        let p = EdgePath::new(tokens);
        let a = free_reduce_path(&g, &p.reversed()).unwrap();
        let b = free_reduce_path(&g, &p).unwrap().reversed();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn composition_law_on_random_maps() {
    let mut rng = common::rng(101);
    for _ in 0..300 {
        let g = common::random_graph(&mut rng);
        let f = common::random_map(&g, &mut rng, 5);
        let h = common::random_map(&g, &mut rng, 5);
        let product = incidence_matrix(&h).unwrap().checked_mul(&incidence_matrix(&f).unwrap()).unwrap();
        assert_eq!(incidence_matrix(&compose_maps(&f, &h, false).unwrap()).unwrap(), product);
        if let Ok(reduced) = compose_maps(&f, &h, true) {
            assert!(incidence_matrix(&reduced).unwrap().entrywise_le(&product));
            assert!(reduced.edge_map().iter().all(|p| p.is_reduced()));
        }
    }
}

#[test]
fn composition_is_associative_without_reduction() {
    let mut rng = common::rng(102);
    for _ in 0..100 {
        let g = common::random_graph(&mut rng);
        let maps: Vec<GraphMap> = (0..3).map(|_| common::random_map(&g, &mut rng, 3)).collect();
        let left = compose_maps(&compose_maps(&maps[0], &maps[1], false).unwrap(), &maps[2], false).unwrap();
        let right = compose_maps(&maps[0], &compose_maps(&maps[1], &maps[2], false).unwrap(), false).unwrap();
        assert_eq!(left, right);
    }
}

#[test]
fn incidence_is_relabeling_invariant() {
    let mut rng = common::rng(103);
    for _ in 0..200 {
        let g = common::random_graph(&mut rng);
        let f = common::random_map(&g, &mut rng, 5);
        let perm = common::random_permutation(&mut rng, g.edge_count());
        let data = g.to_data();
        let permuted = Graph::from_data(&GraphData {
            vertices: data.vertices.clone(),
            edges: perm.iter().map(|&i| data.edges[i].clone()).collect(),
        })
        .unwrap();
        let images: BTreeMap<String, String> = f.named_images();
        let f2 = GraphMap::from_named(permuted.clone(), permuted, Some(&f.named_vertex_map()), &images).unwrap();
        let m = incidence_matrix(&f).unwrap();
        assert_eq!(incidence_matrix(&f2).unwrap(), m.permuted(&perm).unwrap());
    }
}

#[test]
fn identity_map_has_identity_incidence() {
    let mut rng = common::rng(104);
    for _ in 0..20 {
        let g = common::random_graph(&mut rng);
        let id = GraphMap::identity(&g);
        assert_eq!(incidence_matrix(&id).unwrap(), hbgrowth::NonNegMatrix::identity(g.edge_count()).unwrap());
    }
}
