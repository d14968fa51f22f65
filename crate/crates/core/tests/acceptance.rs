//! The twelve acceptance criteria, run cold at ν = 1/3, ω = 1.
//!
//! Three criteria fail against the published data and are expected to keep
//! failing: the printed τ₄ is not invariant (3), so the orbit-sum fit
//! against it breaks at the fourth component (4), and two printed
//! eigenfunctions do not satisfy their equations (9). Any change to that
//! set, in either direction, fails this test.

use std::collections::BTreeSet;
use std::time::Instant;

use h4_core::pipeline::Pipeline;
use h4_core::verify::{run_all, Status, VerifyConfig};

const KNOWN_FAILURES: [u8; 3] = [3, 4, 9];

#[test]
fn acceptance_criteria() {
    let pipeline = Pipeline::embedded().unwrap();
    let start = Instant::now();
    let mut last = start;
    let reports = run_all(&pipeline, &VerifyConfig::default(), |r| {
        let now = Instant::now();
        println!("{r} ({:.1}s)", (now - last).as_secs_f64());
        last = now;
    });
    println!("total {:.1}s", start.elapsed().as_secs_f64());
    assert_eq!(reports.len(), 12);
    assert!(reports.iter().all(|r| r.status != Status::Skipped));
    let failing: BTreeSet<u8> = reports.iter().filter(|r| r.status == Status::Fail).map(|r| r.id).collect();
    assert_eq!(failing, KNOWN_FAILURES.into_iter().collect::<BTreeSet<_>>());
}
