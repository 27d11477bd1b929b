mod common;

use hbgrowth::spectral::{self, PfOptions, Verdict};
use hbgrowth::tightening::{self, Branch, Catalog, TighteningMove};
use hbgrowth::NonNegMatrix;
use proptest::prelude::*;

proptest! {
    #[test]
    fn apply_move_changes_one_row(
        rows in prop::collection::vec(prop::collection::vec(0u64..6, 4), 4),
        row in 0usize..4,
        delta in prop::collection::vec(-3i64..4, 4),
    ) {
        let m = NonNegMatrix::new(rows).unwrap();
        let mv = TighteningMove::new(row, delta.clone());
        match tightening::apply_move(&m, &mv) {
            Ok(after) => {
                for i in 0..4 {
                    for j in 0..4 {
                        let expected = if i == row { (m.get(i, j) as i64 + delta[j]) as u64 } else { m.get(i, j) };
                        prop_assert_eq!(after.get(i, j), expected);
                    }
                }
            }
            Err(_) => prop_assert!((0..4).any(|j| m.get(row, j) as i64 + delta[j] < 0)),
        }
    }
}

#[test]
fn negative_gain_moves_decrease_growth() {
    let mut rng = common::rng(301);
    let mut evaluated = 0;
    for k in 0..120 {
        let m = common::random_irreducible(&mut rng, 2 + k % 4, 4);
        for catalog in [Catalog::Swap, Catalog::Free] {
            for o in tightening::search_moves(&m, catalog, &[], PfOptions::default()).unwrap() {
                evaluated += 1;
                assert!(o.gain < 0.0);
                assert!(o.growth_after < o.growth_before, "{o:?}");
                if let Branch::Irreducible { subinvariance, .. } = &o.branch {
                    assert_eq!(subinvariance.verdict, Verdict::Lt);
                }
            }
        }
    }
    assert!(evaluated > 100);
}

#[test]
fn search_is_deterministic() {
    let mut rng = common::rng(302);
    for k in 0..30 {
        let m = common::random_irreducible(&mut rng, 2 + k % 4, 4);
        let a = tightening::search_moves(&m, Catalog::Free, &[], PfOptions::default()).unwrap();
        let b = tightening::search_moves(&m, Catalog::Free, &[], PfOptions::default()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        for w in a.windows(2) {
            assert!(w[0].growth_after <= w[1].growth_after);
        }
    }
}

/// Largest eigenvalue of a nonnegative 2×2 matrix in closed form.
fn lambda2(m: [[f64; 2]; 2]) -> f64 {
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    (a + d) / 2.0 + (((a - d) / 2.0).powi(2) + b * c).sqrt()
}

#[test]
fn swap_search_matches_brute_force_on_2x2() {
    let mut rng = common::rng(303);
    for _ in 0..200 {
        let m = common::random_irreducible(&mut rng, 2, 6);
        let e = |i, j| m.get(i, j) as f64;
        let lam = lambda2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]);
        // eigenvector from the first row, or the second when b = 0
        let v = if m.get(0, 1) > 0 { [e(0, 1), lam - e(0, 0)] } else { [lam - e(1, 1), e(1, 0)] };
        let scale = v[0].max(v[1]);
        let v = [v[0] / scale, v[1] / scale];

        let mut best: Option<f64> = None;
        let mut count = 0;
        for row in 0..2 {
            for (p, q) in [(0usize, 1usize), (1, 0)] {
                for c in 1..=(m.get(row, p) / 2) as i64 {
                    let gain = -2.0 * c as f64 * v[p] + 2.0 * c as f64 * v[q];
                    if gain >= -tightening::GAIN_EPS {
                        continue;
                    }
                    let mut after = [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]];
                    after[row][p] -= 2.0 * c as f64;
                    after[row][q] += 2.0 * c as f64;
                    let l = lambda2(after);
                    count += 1;
                    best = Some(best.map_or(l, |b: f64| b.min(l)));
                }
            }
        }
        let found = tightening::search_moves(&m, Catalog::Swap, &[], PfOptions::default()).unwrap();
        assert_eq!(found.len(), count, "{m:?}");
        if let (Some(b), Some(top)) = (best, found.first()) {
            assert!((b - top.growth_after).abs() <= 1e-9, "{b} vs {}", top.growth_after);
        }
    }
}

#[test]
fn genus2_move_via_extra_list() {
    let m = NonNegMatrix::new(vec![vec![3, 1, 1, 0], vec![4, 1, 3, 2], vec![1, 0, 2, 1], vec![1, 0, 1, 1]]).unwrap();
    let given = TighteningMove::new(1, vec![-2, 0, -2, 0]);
    let ranked = tightening::search_moves(&m, Catalog::Swap, std::slice::from_ref(&given), PfOptions::default()).unwrap();
    let o = ranked.iter().find(|o| o.mv == given).unwrap();
    assert!((o.growth_after - 4.542).abs() < 1e-3);
    let lambda = spectral::pf_eigen(&m, PfOptions::default()).unwrap().lambda;
    let w = tightening::standard_weights(&m, PfOptions::default()).unwrap();
    let r = spectral::subinvariance_test(&o.matrix_after, w.weights(), lambda, spectral::DEFAULT_SLACK).unwrap();
    assert_eq!(r.verdict, Verdict::Lt);
}

#[test]
fn positive_gain_moves_are_rejected() {
    let m = NonNegMatrix::new(vec![vec![1, 1], vec![1, 1]]).unwrap();
    let mv = TighteningMove::new(0, vec![-1, 0]);
    assert!(tightening::evaluate_move(&m, &mv, PfOptions::default()).is_ok());
    let zero = TighteningMove::new(0, vec![-1, 1]);
    assert!(tightening::evaluate_move(&m, &zero, PfOptions::default()).is_err());
}
