use serde::{Deserialize, Serialize};

use crate::env::{is_safe_set, ConflictGraph, Schedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Safe,
    Corrected,
}

/// Evidence that a schedule is conflict-free against a specific graph.
///
/// A `Safe` certificate passes the proposal through unchanged. A `Corrected`
/// one lists the conflicting pairs found in the proposal and carries a
/// maximal independent subset in their place. Either way `certified_set`
/// can be re-checked with [`check_certificate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub proposal: Schedule,
    pub verdict: Verdict,
    pub checked_edges: Vec<(usize, usize)>,
    pub witness_conflicts: Vec<(usize, usize)>,
    pub certified_set: Schedule,
}

impl Certificate {
    pub fn is_corrected(&self) -> bool {
        self.verdict == Verdict::Corrected
    }
}

/// Re-verifies a certificate against `graph`.
pub fn check_certificate(cert: &Certificate, graph: &ConflictGraph) -> bool {
    if !is_safe_set(&cert.certified_set, graph) || !cert.certified_set.is_subset_of(&cert.proposal) {
        return false;
    }
    match cert.verdict {
        Verdict::Safe => cert.witness_conflicts.is_empty() && cert.certified_set == cert.proposal,
        Verdict::Corrected => {
            !cert.witness_conflicts.is_empty()
                && cert.certified_set.len() < cert.proposal.len()
                && cert.witness_conflicts.iter().all(|&(a, b)| graph.has_edge(a, b))
        }
    }
}

/// Checks `proposal` against the conflict graph, correcting it to a greedy
/// maximal independent subset if any pair inside it conflicts.
pub fn verify_schedule(proposal: &Schedule, graph: &ConflictGraph, queues: &[u32]) -> Certificate {
    let checked_edges = ConflictGraph::pairs_within(proposal);
    let witness_conflicts: Vec<_> = checked_edges
        .iter()
        .copied()
        .filter(|&(a, b)| graph.has_edge(a, b))
        .collect();
    if witness_conflicts.is_empty() {
        Certificate {
            proposal: proposal.clone(),
            verdict: Verdict::Safe,
            checked_edges,
            witness_conflicts,
            certified_set: proposal.clone(),
        }
    } else {
        Certificate {
            proposal: proposal.clone(),
            verdict: Verdict::Corrected,
            checked_edges,
            witness_conflicts,
            certified_set: greedy_mis(proposal, graph, queues),
        }
    }
}

/// Greedy maximal independent subset of `proposal`.
///
/// Members are visited by queue length descending, then index ascending; a
/// member is admitted when none of its neighbors has been admitted yet.
pub fn greedy_mis(proposal: &Schedule, graph: &ConflictGraph, queues: &[u32]) -> Schedule {
    let mut order: Vec<usize> = proposal.iter().collect();
    let q = |d: usize| queues.get(d).copied().unwrap_or(0);
    order.sort_by(|&a, &b| q(b).cmp(&q(a)).then(a.cmp(&b)));
    let mut admitted: Vec<usize> = Vec::with_capacity(order.len());
    for d in order {
        if admitted.iter().all(|&a| !graph.has_edge(a, d)) {
            admitted.push(d);
        }
    }
    Schedule::new(admitted)
}
