use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{ChannelState, EnvConfig, Schedule, TopologyMode};
use crate::{rng::Rng, Error, Result};

/// Undirected conflict graph over devices. An edge marks a pair that cannot
/// transmit in the same slot; safe schedules are exactly the independent sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictGraph {
    n: usize,
    /// Sorted `(i, j)` pairs with `i < j`.
    edges: Vec<(usize, usize)>,
    #[serde(skip)]
    adjacency: Vec<Vec<usize>>,
    #[serde(skip)]
    matrix: Vec<bool>,
}

impl ConflictGraph {
    pub fn empty(n: usize) -> Self {
        ConflictGraph {
            n,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n],
            matrix: vec![false; n * n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                g.insert(i, j);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    /// Adds an undirected edge. Self-loops and out-of-range endpoints are
    /// rejected; repeated edges are ignored.
    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<()> {
        for d in [a, b] {
            if d >= self.n {
                return Err(Error::DeviceOutOfRange { device: d, n_devices: self.n });
            }
        }
        if a == b {
            return Err(Error::InvalidConfig(format!("self-loop on vertex {a}")));
        }
        if !self.has_edge(a, b) {
            self.insert(a.min(b), a.max(b));
        }
        Ok(())
    }

    fn insert(&mut self, i: usize, j: usize) {
        let pos = self.edges.binary_search(&(i, j)).unwrap_or_else(|p| p);
        self.edges.insert(pos, (i, j));
        self.matrix[i * self.n + j] = true;
        self.matrix[j * self.n + i] = true;
        for (u, v) in [(i, j), (j, i)] {
            let adj = &mut self.adjacency[u];
            let p = adj.binary_search(&v).unwrap_or_else(|p| p);
            adj.insert(p, v);
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && b < self.n && self.matrix[a * self.n + b]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Edges with both endpoints inside `schedule`, in ascending order.
    pub fn internal_edges(&self, schedule: &Schedule) -> Vec<(usize, usize)> {
        let m = schedule.members();
        let mut out = Vec::new();
        for (k, &i) in m.iter().enumerate() {
            for &j in &m[k + 1..] {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Edges examined when checking `schedule`: every pair inside it.
    pub(crate) fn pairs_within(schedule: &Schedule) -> Vec<(usize, usize)> {
        let m = schedule.members();
        m.iter()
            .enumerate()
            .flat_map(|(k, &i)| m[k + 1..].iter().map(move |&j| (i, j)))
            .collect()
    }

    /// Rebuilds derived lookups after deserialization.
    pub fn rebuild(mut self) -> Result<Self> {
        let edges = std::mem::take(&mut self.edges);
        Self::from_edges(self.n, &edges)
    }
}

/// Fraction of vertex pairs joined by an edge.
pub fn measure_density(graph: &ConflictGraph) -> f64 {
    let n = graph.n_vertices();
    if n < 2 {
        return 0.0;
    }
    graph.n_edges() as f64 / (n * (n - 1) / 2) as f64
}

/// True iff no edge has both endpoints in `schedule`.
pub fn is_safe_set(schedule: &Schedule, graph: &ConflictGraph) -> bool {
    let m = schedule.members();
    m.iter()
        .enumerate()
        .all(|(k, &i)| m[k + 1..].iter().all(|&j| !graph.has_edge(i, j)))
}

/// Draws the episode's conflict graph.
///
/// In random-graph mode every pair is an edge independently with probability
/// `target_density`. In physical mode a pair conflicts when either device,
/// transmitting alongside the other, would fall below the SINR threshold.
pub fn build_conflict_graph(
    config: &EnvConfig,
    channel: &ChannelState,
    rng: &mut Rng,
) -> Result<ConflictGraph> {
    let n = config.n_devices;
    if n < 2 {
        return Err(Error::InvalidConfig(format!(
            "conflict graph needs at least 2 devices, got {n}"
        )));
    }
    let mut g = ConflictGraph::empty(n);
    match config.topology_mode {
        TopologyMode::RandomGraph => {
            let p = config.target_density;
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen::<f64>() < p {
                        g.insert(i, j);
                    }
                }
            }
        }
        TopologyMode::Physical => {
            let h = &channel.gains;
            let noise = channel.noise_power;
            let gamma = config.sinr_threshold;
            for i in 0..n {
                for j in i + 1..n {
                    if h[i] / (h[j] + noise) < gamma || h[j] / (h[i] + noise) < gamma {
                        g.insert(i, j);
                    }
                }
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    #[test]
    fn density_examples() {
        assert_eq!(measure_density(&ConflictGraph::empty(5)), 0.0);
        assert_eq!(measure_density(&ConflictGraph::complete(4)), 1.0);
        let g = ConflictGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!((measure_density(&g) - 2.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn safe_set_examples() {
        let g = ConflictGraph::from_edges(4, &[(1, 2)]).unwrap();
        assert!(is_safe_set(&Schedule::new([1, 3]), &g));
        assert!(!is_safe_set(&Schedule::new([1, 2]), &g));
        assert!(is_safe_set(&Schedule::empty(), &g));
        assert!(is_safe_set(&Schedule::singleton(2), &g));
    }

    #[test]
    fn adjacency_mirrors_edges() {
        let g = ConflictGraph::from_edges(5, &[(3, 1), (0, 4), (1, 3), (2, 1)]).unwrap();
        assert_eq!(g.edges(), &[(0, 4), (1, 2), (1, 3)]);
        assert_eq!(g.neighbors(1), &[2, 3]);
        for &(a, b) in g.edges() {
            assert!(g.has_edge(a, b) && g.has_edge(b, a));
        }
        let total: usize = (0..5).map(|v| g.degree(v)).sum();
        assert_eq!(total, 2 * g.n_edges());
    }

    #[test]
    fn rejects_self_loops_and_bad_vertices() {
        let mut g = ConflictGraph::empty(3);
        assert!(g.add_edge(1, 1).is_err());
        assert!(g.add_edge(0, 3).is_err());
    }

    #[test]
    fn zero_density_has_no_edges() {
        let cfg = EnvConfig { target_density: 0.0, ..EnvConfig::default() };
        let ch = ChannelState::draw(&cfg, &mut stream(1, Stream::Fading));
        let g = build_conflict_graph(&cfg, &ch, &mut stream(1, Stream::Topology)).unwrap();
        assert_eq!(g.n_edges(), 0);
    }

    #[test]
    fn physical_unit_gains_conflict() {
        let cfg = EnvConfig {
            n_devices: 2,
            n_channels: 1,
            topology_mode: TopologyMode::Physical,
            sinr_threshold: 1.0,
            noise_power: 1.0,
            ..EnvConfig::default()
        };
        let ch = ChannelState { gains: vec![1.0, 1.0], noise_power: 1.0 };
        let g = build_conflict_graph(&cfg, &ch, &mut stream(0, Stream::Topology)).unwrap();
        assert!(g.has_edge(0, 1));
    }

    #[test]
    fn rejects_single_device() {
        let cfg = EnvConfig { n_devices: 1, n_channels: 1, ..EnvConfig::default() };
        let ch = ChannelState { gains: vec![1.0], noise_power: 1.0 };
        assert!(build_conflict_graph(&cfg, &ch, &mut stream(0, Stream::Topology)).is_err());
    }
}
