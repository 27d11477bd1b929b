mod common;

use hbgrowth::spectral::{self, PfOptions, Verdict};
use hbgrowth::tightening;
use hbgrowth::NonNegMatrix;
use rand::Rng;

#[test]
fn pf_matches_reducible_radius_on_irreducible_inputs() {
    let mut rng = common::rng(201);
    let opts = PfOptions::default();
    for k in 0..200 {
        let m = common::random_irreducible(&mut rng, 1 + k % 7, 5);
        let a = spectral::pf_eigen(&m, opts).unwrap().lambda;
        let b = spectral::spectral_radius_reducible(&m, opts).unwrap();
        assert!((a - b).abs() <= 2.0 * opts.tol * a.max(1.0), "{a} vs {b}");
    }
}

#[test]
fn eigenpair_is_positive_and_residual_small() {
    let mut rng = common::rng(202);
    for k in 0..200 {
        let m = common::random_irreducible(&mut rng, 1 + k % 6, 3);
        let pf = spectral::pf_eigen(&m, PfOptions::default()).unwrap();
        assert!(pf.vector.iter().all(|&x| x > 0.0));
        let max = pf.vector.iter().cloned().fold(0.0, f64::max);
        assert!((max - 1.0).abs() < 1e-12);
        assert!(pf.residual <= 1e-9 * pf.lambda.max(1.0), "residual {}", pf.residual);
    }
}

#[test]
fn permutation_invariance() {
    let mut rng = common::rng(203);
    for k in 0..200 {
        let dim = 2 + k % 6;
        let m = common::random_irreducible(&mut rng, dim, 6);
        let perm = common::random_permutation(&mut rng, dim);
        let a = spectral::pf_eigen(&m, PfOptions::default()).unwrap().lambda;
        let b = spectral::pf_eigen(&m.permuted(&perm).unwrap(), PfOptions::default()).unwrap().lambda;
        assert!((a - b).abs() <= 1e-9);
    }
}

#[test]
fn power_law_on_random_matrices() {
    let mut rng = common::rng(204);
    for k in 0..60 {
        let m = common::random_irreducible(&mut rng, 2 + k % 4, 3);
        for n in 1..=5 {
            let r = tightening::growth_of_power(&m, n, PfOptions::default()).unwrap();
            assert!(r.relative_difference <= 1e-6, "n = {n}: {r:?}");
        }
    }
}

#[test]
fn periodic_matrices_converge() {
    // a 4-cycle: irreducible, imprimitive, λ = 1
    let m = NonNegMatrix::from_fn(4, |i, j| u64::from(j == (i + 1) % 4)).unwrap();
    let pf = spectral::pf_eigen(&m, PfOptions::default()).unwrap();
    assert!((pf.lambda - 1.0).abs() < 1e-12);
    let r = tightening::growth_of_power(&m, 4, PfOptions::default()).unwrap();
    assert!(r.relative_difference < 1e-9);
}

#[test]
fn collatz_wielandt_sandwich() {
    let mut rng = common::rng(205);
    for k in 0..200 {
        let dim = 1 + k % 7;
        let m = common::random_irreducible(&mut rng, dim, 5);
        let lambda = spectral::pf_eigen(&m, PfOptions::default()).unwrap().lambda;
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.01..100.0)).collect();
        let (lo, hi) = spectral::collatz_wielandt_bounds(&m, &v).unwrap();
        let slack = 1e-12 * lambda.max(1.0);
        assert!(lo <= lambda + slack && lambda <= hi + slack, "{lo} {lambda} {hi}");
    }
}

#[test]
fn strict_subinvariance_bounds_the_eigenvalue() {
    let mut rng = common::rng(206);
    let mut seen_lt = 0;
    for k in 0..300 {
        let dim = 1 + k % 5;
        let m = common::random_irreducible(&mut rng, dim, 4);
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.1..10.0)).collect();
        let lambda = rng.gen_range(0.5..15.0);
        let r = spectral::subinvariance_test(&m, &v, lambda, spectral::DEFAULT_SLACK).unwrap();
        let true_lambda = spectral::pf_eigen(&m, PfOptions::default()).unwrap().lambda;
        match r.verdict {
            Verdict::Lt => {
                seen_lt += 1;
                assert!(true_lambda < lambda);
            }
            Verdict::Le => assert!(true_lambda <= lambda + 1e-9),
            Verdict::Inconclusive => assert!(!r.violating_rows.is_empty()),
        }
    }
    assert!(seen_lt > 10);
}

#[test]
fn scc_order_is_topological() {
    let mut rng = common::rng(207);
    for _ in 0..200 {
        let dim = rng.gen_range(1..9);
        let m = NonNegMatrix::from_fn(dim, |_, _| u64::from(rng.gen_bool(0.2))).unwrap();
        let scc = spectral::scc_decomposition(&m);
        for i in 0..dim {
            for j in 0..dim {
                if m.get(i, j) > 0 {
                    assert!(scc.component_of[i] <= scc.component_of[j]);
                }
            }
        }
        let total: usize = scc.components.iter().map(Vec::len).sum();
        assert_eq!(total, dim);
    }
}
