use rand::seq::SliceRandom;

use crate::env::{is_safe_set, ConflictGraph, Schedule};
use crate::rng::Rng;
use crate::safety::greedy_mis;

/// Up to `n_channels` backlogged devices with the longest queues (lowest
/// index on ties).
pub fn baseline_unconstrained(queues: &[u32], n_channels: usize) -> Schedule {
    let mut backlog: Vec<usize> = (0..queues.len()).filter(|&i| queues[i] > 0).collect();
    backlog.sort_by(|&a, &b| queues[b].cmp(&queues[a]).then(a.cmp(&b)));
    backlog.truncate(n_channels);
    Schedule::new(backlog)
}

/// A uniformly random subset of `min(n_channels, backlog)` backlogged devices.
pub fn random_proposal(queues: &[u32], n_channels: usize, rng: &mut Rng) -> Schedule {
    let backlog: Vec<usize> = (0..queues.len()).filter(|&i| queues[i] > 0).collect();
    Schedule::new(backlog.choose_multiple(rng, n_channels).copied())
}

/// Post-hoc projection: unsafe proposals are replaced by their greedy
/// maximal independent subset. Returns the schedule to execute and whether
/// a correction was applied.
pub fn baseline_reactive_wrap(proposal: &Schedule, graph: &ConflictGraph, queues: &[u32]) -> (Schedule, bool) {
    if is_safe_set(proposal, graph) {
        (proposal.clone(), false)
    } else {
        (greedy_mis(proposal, graph, queues), true)
    }
}
