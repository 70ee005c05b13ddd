//! Graph generators: fixed fixtures used across the test suites and a
//! seeded G(n, p) sampler used by tests and the bench harness.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{DynamicGraph, NodeId};

/// Path 0-1-2-3.
pub fn p4() -> DynamicGraph {
    DynamicGraph::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap()
}

/// Cycle on 8 nodes.
pub fn c8() -> DynamicGraph {
    let edges: Vec<_> = (0..8).map(|i| (i, (i + 1) % 8)).collect();
    DynamicGraph::new(8, &edges).unwrap()
}

/// Star with centre 0 and leaves 1..=5.
pub fn star_k15() -> DynamicGraph {
    let edges: Vec<_> = (1..=5).map(|i| (0, i)).collect();
    DynamicGraph::new(6, &edges).unwrap()
}

/// Two K6 blocks (0..6 and 6..12) joined by the path 5-12-13-14-15-6.
/// Block nodes have degree >= 5 > sqrt(16), so they are heavy; the bridge
/// path nodes stay light.
pub fn two_block() -> DynamicGraph {
    let mut edges = Vec::new();
    for lo in [0usize, 6] {
        for a in lo..lo + 6 {
            for b in a + 1..lo + 6 {
                edges.push((a, b));
            }
        }
    }
    edges.extend([(5, 12), (12, 13), (13, 14), (14, 15), (15, 6)]);
    DynamicGraph::new(16, &edges).unwrap()
}

/// Path on `n` nodes: 0-1-...-(n-1).
pub fn path(n: usize) -> DynamicGraph {
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    DynamicGraph::new(n, &edges).unwrap()
}

/// Erdős–Rényi G(n, p) with each edge drawn independently from a
/// ChaCha8 stream, so (n, p, seed) fully determines the graph.
pub fn gnp(n: usize, p: f64, seed: u64) -> DynamicGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    DynamicGraph::new(n, &edges).unwrap()
}

/// A seeded uniform shuffle of the current edge list, used to drive
/// full-teardown runs.
pub fn shuffled_edges(g: &DynamicGraph, seed: u64) -> Vec<(NodeId, NodeId)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = g.edges();
    for i in (1..edges.len()).rev() {
        let j = rng.gen_range(0..=i);
        edges.swap(i, j);
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_expected_shape() {
        assert_eq!(p4().m(), 3);
        assert_eq!(c8().m(), 8);
        assert_eq!(star_k15().degree(0), 5);
        let tb = two_block();
        assert_eq!(tb.n(), 16);
        assert_eq!(tb.m(), 35);
        assert!(tb.is_heavy(0));
        assert!(!tb.is_heavy(13));
    }

    #[test]
    fn gnp_is_deterministic() {
        let a = gnp(32, 0.2, 7);
        let b = gnp(32, 0.2, 7);
        assert_eq!(a.edges(), b.edges());
        let c = gnp(32, 0.2, 8);
        assert_ne!(a.edges(), c.edges());
    }

    #[test]
    fn shuffle_keeps_edge_multiset() {
        let g = c8();
        let mut shuffled = shuffled_edges(&g, 3);
        shuffled.sort_unstable();
        assert_eq!(shuffled, g.edges());
    }
}
