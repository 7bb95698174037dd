// Certify proposals against a conflict graph: safe proposals pass through,
// unsafe ones are corrected to a greedy maximal independent subset.
//
//     cargo run --example certify_schedule

use pccsched::env::{ConflictGraph, Schedule};
use pccsched::safety::{check_certificate, verify_schedule, Verdict};

pub fn run_example() -> pccsched::Result<()> {
    // 0 - 1 - 2 - 3 path plus a chord 0 - 3.
    let graph = ConflictGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (0, 3)])?;
    let queues = [4, 9, 1, 2, 0];

    for proposal in [Schedule::new([0, 2]), Schedule::new([0, 1, 2, 3]), Schedule::empty()] {
        let cert = verify_schedule(&proposal, &graph, &queues);
        println!(
            "{proposal:<10} -> {:?}, conflicts {:?}, certified {}",
            cert.verdict, cert.witness_conflicts, cert.certified_set
        );
        assert!(check_certificate(&cert, &graph));
    }

    // Device 1 has the longest queue, so the greedy pass admits it first.
    let cert = verify_schedule(&Schedule::new([0, 1, 2, 3]), &graph, &queues);
    assert_eq!(cert.verdict, Verdict::Corrected);
    assert_eq!(cert.certified_set, Schedule::new([1, 3]));
    Ok(())
}

#[allow(dead_code)]
fn main() -> pccsched::Result<()> {
    run_example()
}
