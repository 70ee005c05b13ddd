//! Bounded-depth decremental BFS tree (Even-Shiloach / King style).
//!
//! Levels equal exact hop distances from the source, capped at the depth
//! bound `d`; nodes farther than `d` (or disconnected) sit at INF. Under
//! edge deletions levels only increase. Each full edge-list scan of a node
//! coincides with one level increase of that node, so a node scans at most
//! `d` times over the structure's lifetime.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::cmp::Reverse;

use crate::dist::{Dist, INF};
use crate::graph::{DynamicGraph, NodeId};

/// One node whose level grew during a deletion, with the level it held
/// before the deletion and the level it settled at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelChange {
    pub node: NodeId,
    pub old: Dist,
    pub new: Dist,
}

#[derive(Debug, Clone)]
pub struct EsTree {
    source: NodeId,
    depth: Dist,
    /// Levels never rise past this before snapping to INF: a finite
    /// distance cannot exceed n-1, so climbing further is wasted work.
    climb_cap: Dist,
    level: Vec<Dist>,
    parent: Vec<Option<NodeId>>,
    children: Vec<BTreeSet<NodeId>>,
    scan_counter: Vec<u32>,
    total_scans: u64,
    edge_touches: u64,
    m_initial: usize,
}

impl EsTree {
    /// Builds the tree against the current graph. `depth` bounds the
    /// levels kept; pass at least `n` for an uncapped (exact) tree.
    pub fn build(g: &DynamicGraph, source: NodeId, depth: Dist) -> Self {
        let n = g.n();
        let climb_cap = depth.min(n.saturating_sub(1));
        let mut level = vec![INF; n];
        level[source] = 0;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(source);
        let mut edge_touches = 0u64;
        while let Some(u) = queue.pop_front() {
            if level[u] == climb_cap {
                continue;
            }
            for v in g.neighbors(u) {
                edge_touches += 1;
                if level[v] == INF {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        let mut parent = vec![None; n];
        let mut children = vec![BTreeSet::new(); n];
        for v in 0..n {
            if v == source || level[v] == INF {
                continue;
            }
            // Lowest-numbered neighbour one level up.
            let p = g
                .neighbors(v)
                .find(|&z| level[z] + 1 == level[v])
                .expect("in-tree node must have a parent candidate");
            parent[v] = Some(p);
            children[p].insert(v);
        }
        EsTree {
            source,
            depth,
            climb_cap,
            level,
            parent,
            children,
            scan_counter: vec![0; n],
            total_scans: 0,
            edge_touches,
            m_initial: g.m(),
        }
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn depth_bound(&self) -> Dist {
        self.depth
    }

    pub fn level(&self, v: NodeId) -> Dist {
        self.level[v]
    }

    pub fn levels(&self) -> &[Dist] {
        &self.level
    }

    pub fn in_tree(&self, v: NodeId) -> bool {
        self.level[v] < INF
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v]
    }

    pub fn scan_counters(&self) -> &[u32] {
        &self.scan_counter
    }

    pub fn total_scans(&self) -> u64 {
        self.total_scans
    }

    pub fn edge_touches(&self) -> u64 {
        self.edge_touches
    }

    /// Edge count at build time, the `m` in the m·d scan budget.
    pub fn m_initial(&self) -> usize {
        self.m_initial
    }

    /// Reacts to the deletion of edge (u, v). The edge must already be
    /// gone from `g`. Returns the nodes whose level grew, coalesced per
    /// node (pre-deletion level -> settled level), ascending by node.
    pub fn on_delete(&mut self, g: &DynamicGraph, u: NodeId, v: NodeId) -> Vec<LevelChange> {
        let mut orphans: BinaryHeap<Reverse<(Dist, NodeId)>> = BinaryHeap::new();
        for (a, b) in [(u, v), (v, u)] {
            if self.level[b] < INF && self.parent[b] == Some(a) {
                self.children[a].remove(&b);
                self.parent[b] = None;
                orphans.push(Reverse((self.level[b], b)));
            }
        }
        if orphans.is_empty() {
            return Vec::new();
        }
        let mut changed: BTreeMap<NodeId, Dist> = BTreeMap::new();
        while let Some(Reverse((l, w))) = orphans.pop() {
            if self.level[w] != l || self.parent[w].is_some() {
                continue; // stale entry
            }
            // Full scan: best attachment level and its lowest-id witness.
            let mut best_d = INF;
            let mut best_z = None;
            for z in g.neighbors(w) {
                self.edge_touches += 1;
                let cand = self.level[z].saturating_add(1).min(INF);
                if cand < best_d {
                    best_d = cand;
                    best_z = Some(z);
                }
            }
            if best_d == l {
                let z = best_z.unwrap();
                self.parent[w] = Some(z);
                self.children[z].insert(w);
                continue;
            }
            debug_assert!(best_d > l, "level order violated during cascade");
            self.scan_counter[w] += 1;
            self.total_scans += 1;
            changed.entry(w).or_insert(l);
            // Children lose support whenever w leaves its level.
            let kids = std::mem::take(&mut self.children[w]);
            for c in kids {
                self.parent[c] = None;
                orphans.push(Reverse((self.level[c], c)));
            }
            if best_d > self.climb_cap {
                self.level[w] = INF;
            } else {
                self.level[w] = best_d;
                let z = best_z.unwrap();
                self.parent[w] = Some(z);
                self.children[z].insert(w);
                orphans.push(Reverse((best_d, w)));
            }
        }
        changed
            .into_iter()
            .filter(|&(w, old)| self.level[w] != old)
            .map(|(w, old)| LevelChange {
                node: w,
                old,
                new: self.level[w],
            })
            .collect()
    }

    pub(crate) fn corrupt_level(&mut self, v: NodeId, value: Dist) {
        self.level[v] = value;
    }

    /// Structural audit used by the checker: parents live one level up
    /// across live edges, children sets mirror parents, source at 0.
    pub fn structure_ok(&self, g: &DynamicGraph) -> bool {
        if self.level[self.source] != 0 || self.parent[self.source].is_some() {
            return false;
        }
        for v in 0..g.n() {
            match self.parent[v] {
                Some(p) => {
                    if self.level[v] == INF
                        || self.level[p] + 1 != self.level[v]
                        || !g.has_edge(p, v)
                        || !self.children[p].contains(&v)
                    {
                        return false;
                    }
                }
                None => {
                    if v != self.source && self.level[v] != INF {
                        return false;
                    }
                }
            }
            if self.level[v] < INF && self.level[v] > self.depth {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::verify::bfs_distances;

    fn assert_matches_bfs(tree: &EsTree, g: &DynamicGraph) {
        let bfs = bfs_distances(g, tree.source());
        for v in 0..g.n() {
            let want = if bfs[v] <= tree.depth_bound() { bfs[v] } else { INF };
            assert_eq!(tree.level(v), want, "node {v}");
        }
        assert!(tree.structure_ok(g));
    }

    #[test]
    fn build_on_cycle() {
        let g = generators::c8();
        let t = EsTree::build(&g, 0, 8);
        assert_eq!(t.levels(), &[0, 1, 2, 3, 4, 3, 2, 1]);
    }

    #[test]
    fn cycle_deletion_reroutes_long_way() {
        let mut g = generators::c8();
        let mut t = EsTree::build(&g, 0, 8);
        g.delete_edge(0, 1).unwrap();
        let ev = t.on_delete(&g, 0, 1);
        // Frozen expectation: 1 goes 1->7, 2 goes 2->6, 3 goes 3->5.
        assert_eq!(
            ev,
            vec![
                LevelChange { node: 1, old: 1, new: 7 },
                LevelChange { node: 2, old: 2, new: 6 },
                LevelChange { node: 3, old: 3, new: 5 },
            ]
        );
        assert_matches_bfs(&t, &g);
    }

    #[test]
    fn path_disconnection_reports_inf() {
        let mut g = generators::p4();
        let mut t = EsTree::build(&g, 0, 3);
        g.delete_edge(0, 1).unwrap();
        let ev = t.on_delete(&g, 0, 1);
        assert_eq!(
            ev,
            vec![
                LevelChange { node: 1, old: 1, new: INF },
                LevelChange { node: 2, old: 2, new: INF },
                LevelChange { node: 3, old: 3, new: INF },
            ]
        );
        assert_matches_bfs(&t, &g);
    }

    #[test]
    fn depth_bound_truncates() {
        let g = generators::p4();
        let t = EsTree::build(&g, 0, 2);
        assert_eq!(t.levels(), &[0, 1, 2, INF]);
    }

    #[test]
    fn non_tree_edge_deletion_is_silent() {
        let mut g = generators::c8();
        let mut t = EsTree::build(&g, 0, 8);
        // (4,5) is the far edge; 4 is parented via 3, 5 via 6.
        g.delete_edge(4, 5).unwrap();
        let ev = t.on_delete(&g, 4, 5);
        assert!(ev.is_empty());
        assert_matches_bfs(&t, &g);
    }

    #[test]
    fn events_coalesce_multi_step_climbs() {
        // Ladder where a deletion forces a node through several levels.
        let mut g = DynamicGraph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]).unwrap();
        let mut t = EsTree::build(&g, 0, 6);
        assert_eq!(t.level(3), 3);
        g.delete_edge(2, 3).unwrap();
        let ev = t.on_delete(&g, 2, 3);
        // 3 reroutes through 5-4: 0-5-4-3 = level 3 stays. Only check BFS.
        assert_matches_bfs(&t, &g);
        assert!(ev.is_empty()); // distance unchanged via the other side
        g.delete_edge(4, 3).unwrap();
        let ev = t.on_delete(&g, 4, 3);
        assert_eq!(ev, vec![LevelChange { node: 3, old: 3, new: INF }]);
        assert_matches_bfs(&t, &g);
    }

    #[test]
    fn full_teardown_stays_exact_and_within_scan_budget() {
        for seed in 0..6u64 {
            let mut g = generators::gnp(28, 0.12, seed);
            let depth = 9;
            let mut t = EsTree::build(&g, 3, depth);
            let m0 = t.m_initial();
            for (u, v) in generators::shuffled_edges(&g, seed ^ 0xABCD) {
                g.delete_edge(u, v).unwrap();
                t.on_delete(&g, u, v);
                assert_matches_bfs(&t, &g);
                for x in 0..g.n() {
                    assert!(
                        (t.scan_counters()[x] as usize) <= depth,
                        "scan counter exceeded depth"
                    );
                }
            }
            assert!(t.total_scans() <= (m0 * depth) as u64);
        }
    }

    #[test]
    fn star_center_loss() {
        let mut g = generators::star_k15();
        let mut t = EsTree::build(&g, 1, 6);
        assert_eq!(t.levels(), &[1, 0, 2, 2, 2, 2]);
        g.delete_edge(0, 1).unwrap();
        let ev = t.on_delete(&g, 0, 1);
        assert_eq!(ev.len(), 5);
        assert!(ev.iter().all(|e| e.new == INF));
        assert_matches_bfs(&t, &g);
    }
}
