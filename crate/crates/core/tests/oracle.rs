mod common;

use approx::assert_relative_eq;
use koutlab::components::is_cut;
use koutlab::oracle::{
    exact_cut_probability, exact_cut_probability_deleted, exact_cut_probability_direct,
    exhaustive_event_probability, union_bound_sum, union_bound_sum_deleted, union_bound_sum_with,
    ArithmeticMode,
};
use koutlab::Error;

use common::{counts_to_probability, cut_event_counts};

#[test]
fn formula_matches_reference_enumeration_small_n() {
    for n in 4..=5 {
        for k in 2..=3 {
            if k >= n {
                continue;
            }
            for d in 0..=2 {
                let counts = cut_event_counts(n, k, d);
                for r in 1..n - d {
                    for mu in [0.1, 0.25, 0.5, 0.75, 0.9] {
                        let want = counts_to_probability(&counts[r], n, k, d, mu);
                        let got = exact_cut_probability_deleted(n, mu, k, d, r).unwrap();
                        assert!(
                            (got - want).abs() < 1e-13,
                            "n={n} k={k} d={d} r={r} mu={mu}: {got} vs {want}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn spec_examples_against_reference() {
    let c = cut_event_counts(5, 2, 0);
    let want = counts_to_probability(&c[2], 5, 2, 0, 0.5);
    assert!((exact_cut_probability(5, 0.5, 2, 2).unwrap() - want).abs() < 1e-12);

    let c = cut_event_counts(6, 2, 1);
    let want = counts_to_probability(&c[2], 6, 2, 1, 0.5);
    assert!((exact_cut_probability_deleted(6, 0.5, 2, 1, 2).unwrap() - want).abs() < 1e-12);
}

/// The library enumerator, driven through `is_cut` on the realized graph,
/// agrees with the formula.
#[test]
fn library_enumerator_via_is_cut() {
    for (n, k, d) in [(4, 2, 0), (5, 2, 0), (5, 3, 1), (5, 2, 2)] {
        for r in 1..n - d {
            let p = exhaustive_event_probability(n, 0.4, k, d, |g| {
                let dead = g.deleted();
                let graph = g.graph();
                let sub = graph.induced(&dead).unwrap();
                let s = g.first_survivors(r);
                let subset: Vec<u32> = (0..n as u32).filter(|&v| s >> v & 1 == 1).collect();
                is_cut(&sub, &subset).unwrap()
            })
            .unwrap();
            let want = exact_cut_probability_deleted(n, 0.4, k, d, r).unwrap();
            assert!((p - want).abs() < 1e-12, "n={n} k={k} d={d} r={r}: {p} vs {want}");
        }
    }
}

#[test]
fn cut_probability_is_zero_for_singletons() {
    for k in 2..6 {
        assert_eq!(exact_cut_probability(20, 0.3, k, 1).unwrap(), 0.0);
    }
}

#[test]
fn cut_probability_decreasing_in_r() {
    for mu in [0.1, 0.5, 0.9] {
        let p: Vec<f64> = (2..=50).map(|r| exact_cut_probability(100, mu, 2, r).unwrap()).collect();
        for w in p.windows(2) {
            assert!(w[1] <= w[0], "mu={mu}: {:?}", w);
        }
    }
}

#[test]
fn cut_probability_nondecreasing_in_d() {
    for r in 1..=10 {
        let p: Vec<f64> = (0..=3)
            .map(|d| exact_cut_probability_deleted(20, 0.5, 2, d, r).unwrap())
            .collect();
        for w in p.windows(2) {
            assert!(w[1] >= w[0], "r={r}: {:?}", p);
        }
    }
}

#[test]
fn deleted_reduces_to_undeleted() {
    for r in 1..30 {
        assert_eq!(
            exact_cut_probability_deleted(30, 0.7, 3, 0, r).unwrap(),
            exact_cut_probability(30, 0.7, 3, r).unwrap()
        );
    }
}

#[test]
fn log_domain_agrees_with_float64() {
    for (n, mu, k, d) in [(30, 0.5, 2, 0), (60, 0.9, 2, 3), (100, 0.2, 4, 10), (150, 0.6, 3, 0)] {
        for x in [1, 2, 5, 10] {
            let a = union_bound_sum_with(ArithmeticMode::LogDomain, n, mu, k, d, x).unwrap();
            let b = union_bound_sum_with(ArithmeticMode::Float64, n, mu, k, d, x).unwrap();
            assert_relative_eq!(a.raw_sum, b.raw_sum, max_relative = 1e-9);
        }
        for r in 1..n - d {
            let a = exact_cut_probability_deleted(n, mu, k, d, r).unwrap();
            let b = exact_cut_probability_direct(n, mu, k, d, r).unwrap();
            assert!(a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs()));
        }
    }
}

#[test]
fn union_sum_reference_values() {
    let want = [0.00992, 0.00360, 0.00141, 6.1e-4, 3.0e-4, 1.6e-4, 9.6e-5];
    for (m, w) in (2..=8).zip(want) {
        let got = union_bound_sum(30, 0.5, 2, m).unwrap().raw_sum;
        assert_relative_eq!(got, w, max_relative = 0.03);
    }
}

#[test]
fn union_sum_monotone_in_m_k_mu() {
    let n = 200;
    let by_m: Vec<f64> = (1..=100).map(|m| union_bound_sum(n, 0.7, 2, m).unwrap().raw_sum).collect();
    assert!(by_m.windows(2).all(|w| w[1] <= w[0]));
    let by_k: Vec<f64> = (2..=8).map(|k| union_bound_sum(n, 0.7, k, 5).unwrap().raw_sum).collect();
    assert!(by_k.windows(2).all(|w| w[1] <= w[0]), "{by_k:?}");
    let by_mu: Vec<f64> = (1..=9)
        .map(|i| union_bound_sum(n, i as f64 / 10.0, 2, 5).unwrap().raw_sum)
        .collect();
    assert!(by_mu.windows(2).all(|w| w[1] >= w[0]), "{by_mu:?}");
    let by_d: Vec<f64> = (0..=20)
        .map(|d| union_bound_sum_deleted(n, 0.7, 2, d, 10).unwrap().raw_sum)
        .collect();
    assert!(by_d.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn large_n_stays_finite() {
    let e = union_bound_sum(5000, 0.9, 2, 60).unwrap();
    assert!(e.raw_sum.is_finite() && e.raw_sum > 0.0 && e.value < 1.0);
    assert_relative_eq!(e.raw_sum, 5.2e-7, max_relative = 0.05);
    let e = union_bound_sum(1000, 0.9, 2, 60).unwrap();
    assert_relative_eq!(e.raw_sum, 1.0e-6, max_relative = 0.05);
}

#[test]
fn range_and_budget_errors() {
    assert!(matches!(exact_cut_probability(10, 0.5, 2, 0), Err(Error::Param(_))));
    assert!(matches!(exact_cut_probability(10, 0.5, 2, 10), Err(Error::Param(_))));
    assert!(matches!(exact_cut_probability_deleted(10, 0.5, 2, 3, 7), Err(Error::Param(_))));
    assert!(matches!(union_bound_sum(10, 0.5, 2, 6), Err(Error::Param(_))));
    assert!(matches!(
        exhaustive_event_probability(9, 0.5, 2, 0, |_| true),
        Err(Error::Budget(_))
    ));
}
