//! Undirected unweighted graph under edge deletions.
//!
//! Nodes are dense indices `0..n` and never change; only edges are removed.
//! Every mutation bumps a version counter so derived structures can detect
//! staleness.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

/// Dense node index in `[0, n)`.
pub type NodeId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({u}, {v}) is not present")]
    EdgeAbsent { u: NodeId, v: NodeId },
    #[error("self loop at node {v} rejected")]
    SelfLoop { v: NodeId },
    #[error("node {v} out of range for graph of {n} nodes")]
    InvalidNode { v: NodeId, n: usize },
}

/// Proof that a deletion was applied, carrying the post-deletion version.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeletionReceipt {
    pub u: NodeId,
    pub v: NodeId,
    pub version: u64,
}

/// Adjacency-set graph. Neighbour iteration is in ascending node order,
/// which downstream tie-breaking relies on.
#[derive(Debug, Clone)]
pub struct DynamicGraph {
    adj: Vec<BTreeSet<NodeId>>,
    m: usize,
    version: u64,
}

impl DynamicGraph {
    /// Builds a graph from an edge list. Duplicate edges collapse; self
    /// loops and out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self, GraphError> {
        let mut g = DynamicGraph {
            adj: vec![BTreeSet::new(); n],
            m: 0,
            version: 0,
        };
        for &(u, v) in edges {
            g.check_node(u)?;
            g.check_node(v)?;
            if u == v {
                return Err(GraphError::SelfLoop { v });
            }
            if g.adj[u].insert(v) {
                g.adj[v].insert(u);
                g.m += 1;
            }
        }
        Ok(g)
    }

    fn check_node(&self, v: NodeId) -> Result<(), GraphError> {
        if v >= self.adj.len() {
            Err(GraphError::InvalidNode {
                v,
                n: self.adj.len(),
            })
        } else {
            Ok(())
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Live edge count.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Monotone counter, bumped once per successful deletion.
    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.n() && self.adj[u].contains(&v)
    }

    /// Neighbours of `v` in ascending order.
    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adj[v].iter().copied()
    }

    /// Removes an undirected edge. The edge must currently exist.
    pub fn delete_edge(&mut self, u: NodeId, v: NodeId) -> Result<DeletionReceipt, GraphError> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(GraphError::SelfLoop { v });
        }
        if !self.adj[u].remove(&v) {
            return Err(GraphError::EdgeAbsent { u, v });
        }
        self.adj[v].remove(&u);
        self.m -= 1;
        self.version += 1;
        Ok(DeletionReceipt {
            u,
            v,
            version: self.version,
        })
    }

    /// Raw-degree heavy test: deg(v) > n^(1/2), evaluated on the live graph.
    pub fn is_heavy(&self, v: NodeId) -> bool {
        self.degree(v) as f64 > (self.n() as f64).sqrt()
    }

    /// All current edges with u < v, ascending.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n() {
            for &v in self.adj[u].range(u + 1..) {
                out.push((u, v));
            }
        }
        out
    }

    /// Internal consistency: symmetric adjacency, no self loops, and the
    /// edge counter matching the adjacency sets.
    pub fn self_check(&self) -> bool {
        let mut half_edges = 0usize;
        for u in 0..self.n() {
            for &v in &self.adj[u] {
                if v == u || v >= self.n() || !self.adj[v].contains(&u) {
                    return false;
                }
                half_edges += 1;
            }
        }
        half_edges == 2 * self.m
    }

    /// Serialises to the text format accepted by [`parse_graph`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n(), self.m());
        for (u, v) in self.edges() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    pub(crate) fn corrupt_drop_half_edge(&mut self, u: NodeId, v: NodeId) {
        self.adj[u].remove(&v);
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: {source}")]
    BadEdge {
        line: usize,
        #[source]
        source: GraphError,
    },
    #[error("expected {expected} edges, found {found}")]
    EdgeCount { expected: usize, found: usize },
}

/// Parses the graph text format: a header line `n m`, then `m` lines `u v`.
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_graph(text: &str) -> Result<DynamicGraph, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let s = raw.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        let mut it = s.split_whitespace();
        let a = it.next();
        let b = it.next();
        let extra = it.next();
        let (a, b) = match (a, b, extra) {
            (Some(a), Some(b), None) => (a, b),
            _ => {
                return Err(ParseError::Malformed {
                    line,
                    msg: format!("expected two integers, got {s:?}"),
                })
            }
        };
        let parse = |t: &str| -> Result<usize, ParseError> {
            t.parse().map_err(|_| ParseError::Malformed {
                line,
                msg: format!("not an integer: {t:?}"),
            })
        };
        let (a, b) = (parse(a)?, parse(b)?);
        if header.is_none() {
            header = Some((a, b));
        } else {
            edges.push((a, b));
        }
    }
    let (n, m) = header.ok_or(ParseError::Malformed {
        line: 0,
        msg: "missing header line".into(),
    })?;
    if edges.len() != m {
        return Err(ParseError::EdgeCount {
            expected: m,
            found: edges.len(),
        });
    }
    DynamicGraph::new(n, &edges).map_err(|source| ParseError::BadEdge { line: 0, source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_path() {
        let g = DynamicGraph::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.m(), 3);
        assert_eq!(g.degree(1), 2);
        assert!(g.has_edge(2, 1));
        assert!(!g.has_edge(0, 3));
        assert!(g.self_check());
    }

    #[test]
    fn delete_updates_both_sides() {
        let mut g = DynamicGraph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let r = g.delete_edge(1, 0).unwrap();
        assert_eq!(r.version, 1);
        assert!(!g.has_edge(0, 1));
        assert!(!g.has_edge(1, 0));
        assert_eq!(g.m(), 1);
        assert!(g.self_check());
    }

    #[test]
    fn delete_absent_edge_errors() {
        let mut g = DynamicGraph::new(3, &[(0, 1)]).unwrap();
        assert_eq!(
            g.delete_edge(0, 2),
            Err(GraphError::EdgeAbsent { u: 0, v: 2 })
        );
        assert_eq!(g.version(), 0);
    }

    #[test]
    fn self_loop_rejected() {
        assert_eq!(
            DynamicGraph::new(2, &[(1, 1)]).unwrap_err(),
            GraphError::SelfLoop { v: 1 }
        );
    }

    #[test]
    fn heavy_is_strict_sqrt_comparison() {
        // n = 9: threshold is deg > 3.
        let mut edges = vec![(0, 1), (0, 2), (0, 3), (0, 4)];
        edges.push((5, 6));
        let g = DynamicGraph::new(9, &edges).unwrap();
        assert!(g.is_heavy(0)); // degree 4 > 3
        assert!(!g.is_heavy(1)); // degree 1

        // Exactly sqrt(n) is not heavy: n = 9, degree 3.
        let g2 = DynamicGraph::new(9, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(!g2.is_heavy(0));
    }

    #[test]
    fn heaviness_degrades_under_deletion() {
        let mut g = DynamicGraph::new(9, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert!(g.is_heavy(0));
        g.delete_edge(0, 4).unwrap();
        assert!(!g.is_heavy(0));
    }

    #[test]
    fn parse_round_trip() {
        let text = "# comment\n4 3\n0 1\n\n1 2\n2 3\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edges(), vec![(0, 1), (1, 2), (2, 3)]);
        let again = parse_graph(&g.to_text()).unwrap();
        assert_eq!(again.edges(), g.edges());
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(matches!(
            parse_graph("2 1\n0\n"),
            Err(ParseError::Malformed { line: 2, .. })
        ));
        assert!(matches!(
            parse_graph("2 2\n0 1\n"),
            Err(ParseError::EdgeCount {
                expected: 2,
                found: 1
            })
        ));
        assert!(matches!(
            parse_graph("2 1\n0 5\n"),
            Err(ParseError::BadEdge { .. })
        ));
    }
}
