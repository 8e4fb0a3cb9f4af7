//! Full-scale runs. Minutes of CPU; run with `cargo test --test full_scale -- --ignored`.

use koutlab::experiments::run_point;
use koutlab::graph::GraphParams;
use koutlab::rng::point_seed;

#[test]
#[ignore]
fn outside_count_n5000_over_1e5_trials() {
    let params = GraphParams::two_type(5000, 0.9, 2).unwrap();
    let s = run_point(&params, 0, 100_000, point_seed(5000, 0)).unwrap();
    eprintln!("n=5000: max_outside = {}, avg_cmax = {:.3}", s.max_outside, s.avg_cmax);
    assert!(s.max_outside <= 45, "{}", s.max_outside);
}

#[test]
#[ignore]
fn outside_count_n1000_over_1e5_trials() {
    let params = GraphParams::two_type(1000, 0.9, 2).unwrap();
    let s = run_point(&params, 0, 100_000, point_seed(1000, 0)).unwrap();
    eprintln!("n=1000: max_outside = {}, avg_cmax = {:.3}", s.max_outside, s.avg_cmax);
    assert!(s.max_outside <= 70, "{}", s.max_outside);
}
