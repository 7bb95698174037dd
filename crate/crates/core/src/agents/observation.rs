use serde::{Deserialize, Serialize};

use crate::env::ConflictGraph;

/// Normalized agent input: per-device queue fill, the budget fraction, and
/// per-device conflict degree. Length `2 * n_devices + 1`, entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub queue_frac: Vec<f64>,
    pub budget_frac: f64,
    pub degree_frac: Vec<f64>,
}

impl Observation {
    /// `include_degrees = false` zeroes the degree block but keeps the shape.
    pub fn new(
        queues: &[u32],
        queue_cap: u32,
        budget_frac: f64,
        graph: &ConflictGraph,
        include_degrees: bool,
    ) -> Self {
        let n = queues.len();
        let cap = queue_cap.max(1) as f64;
        let denom = n.saturating_sub(1).max(1) as f64;
        Observation {
            queue_frac: queues.iter().map(|&q| (q as f64 / cap).min(1.0)).collect(),
            budget_frac: budget_frac.clamp(0.0, 1.0),
            degree_frac: (0..n)
                .map(|v| if include_degrees { graph.degree(v) as f64 / denom } else { 0.0 })
                .collect(),
        }
    }

    pub fn n_devices(&self) -> usize {
        self.queue_frac.len()
    }

    pub fn dim(&self) -> usize {
        2 * self.n_devices() + 1
    }

    pub fn is_backlogged(&self, device: usize) -> bool {
        self.queue_frac[device] > 0.0
    }

    /// Flat input vector: queues, budget, degrees.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dim());
        v.extend_from_slice(&self.queue_frac);
        v.push(self.budget_frac);
        v.extend_from_slice(&self.degree_frac);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_range() {
        let g = ConflictGraph::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        let o = Observation::new(&[0, 25, 60], 50, 0.5, &g, true);
        assert_eq!(o.dim(), 7);
        assert_eq!(o.to_vec(), vec![0.0, 0.5, 1.0, 0.5, 1.0, 0.5, 0.5]);
        assert!(!o.is_backlogged(0) && o.is_backlogged(1));
        let blind = Observation::new(&[0, 25, 60], 50, 0.5, &g, false);
        assert!(blind.degree_frac.iter().all(|&d| d == 0.0));
    }
}
