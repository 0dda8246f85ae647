use std::time::Instant;

use satake_isolator::demo;
use satake_isolator::isolator::build_mu;
use satake_isolator::spectrum::{parse_config, verify};

fn round_trip(text: &str) {
    let cfg = parse_config(text).unwrap();
    let start = Instant::now();
    let report = build_mu(&cfg).unwrap();
    let built = start.elapsed();
    let v = verify(&report.mu, &report.factors, &cfg).unwrap();
    eprintln!(
        "terms {} build {:?} verify {:?}",
        report.mu.num_terms(),
        built,
        start.elapsed() - built
    );
    assert!(v.pass, "{:?}", v.failures());
}

#[test]
fn pgl2_demo_verifies() {
    round_trip(demo::PGL2);
}

#[test]
fn rank2_demo_verifies() {
    round_trip(demo::RANK2);
}
