//! Scale-bounded shortest-path trees over sparsely-covered nodes.
//!
//! For every scale-sample source s in S_i the forest keeps a depth-capped
//! decremental BFS tree whose membership is filtered: a node is admitted
//! (or kept after its level rises) only while no *exclusion test* shows
//! that the landmark relays already cover it almost as well as the tree
//! would. Three tests run in order, regime-gated by the candidate level d:
//!
//! 1. **short relay** (d within the short horizon): the exact short-family
//!    relay to s is within d + 2.
//! 2. **ball detour** (d beyond the horizon): some node w of the cover
//!    ball around the candidate, itself outside the tree, satisfies
//!    d >= level(w) + scale_min(w, s, i) / (1 + eps).
//! 3. **scale cover** (d beyond the horizon): the capped scale relay to s
//!    is within (1 + eps) * d.
//!
//! Cover balls are depth-beta trees that activate permanently around any
//! node whose distance to the landmark set exceeds beta.
//!
//! Tree levels only rise. A deletion triggers the usual orphan cascade
//! (re-testing admission at every level raise), and every relay-minimum
//! rise reported by the relay layer triggers re-admission sweeps, because
//! a rise can invalidate the proof that once excluded a node.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use thiserror::Error;

use crate::dist::{Dist, INF};
use crate::estree::EsTree;
use crate::graph::{DynamicGraph, NodeId};
use crate::relay::{RelayHeaps, RelayOutcome};
use crate::sampling::SampleSets;

/// A node needed its cover ball for an exclusion test but none was active,
/// although its landmark distance exceeds the activation radius. This is a
/// pipeline-order bug, never a data condition.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("node {node} has no active cover ball although its landmark distance exceeds the activation radius")]
pub struct StaleCover {
    pub node: NodeId,
}

/// Which exclusion test fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExclusionTest {
    ShortRelay,
    BallDetour,
    ScaleCover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdmissionVerdict {
    Light,
    NotLight(ExclusionTest),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipChange {
    Added { level: Dist },
    LevelChanged { old: Dist, new: Dist },
    Removed { old: Dist },
}

/// One membership change of one scale tree, in emission order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MembershipEvent {
    pub source: NodeId,
    pub scale: u32,
    pub node: NodeId,
    pub change: MembershipChange,
}

/// Cover balls: per-node depth-beta trees, activated once the node's
/// distance to the landmark set exceeds beta, active forever after.
#[derive(Debug)]
pub struct BallRegistry {
    beta: Dist,
    balls: Vec<Option<EsTree>>,
    activations: u64,
}

impl BallRegistry {
    fn build(g: &DynamicGraph, relay: &RelayHeaps) -> Self {
        let beta = relay.params().beta;
        let mut reg = BallRegistry {
            beta,
            balls: (0..g.n()).map(|_| None).collect(),
            activations: 0,
        };
        for v in 0..g.n() {
            if relay.dist_to_q(v) > beta {
                reg.activate(g, v);
            }
        }
        reg
    }

    fn activate(&mut self, g: &DynamicGraph, v: NodeId) {
        debug_assert!(self.balls[v].is_none());
        self.balls[v] = Some(EsTree::build(g, v, self.beta));
        self.activations += 1;
    }

    fn on_delete(&mut self, g: &DynamicGraph, u: NodeId, v: NodeId) {
        for ball in self.balls.iter_mut().flatten() {
            ball.on_delete(g, u, v);
        }
    }

    pub fn beta(&self) -> Dist {
        self.beta
    }

    pub fn is_active(&self, v: NodeId) -> bool {
        self.balls[v].is_some()
    }

    pub fn ball(&self, v: NodeId) -> Option<&EsTree> {
        self.balls[v].as_ref()
    }

    pub fn active_count(&self) -> usize {
        self.balls.iter().filter(|b| b.is_some()).count()
    }

    pub fn activations(&self) -> u64 {
        self.activations
    }

    pub fn edge_touches(&self) -> u64 {
        self.balls
            .iter()
            .flatten()
            .map(|b| b.edge_touches())
            .sum()
    }

    pub(crate) fn corrupt_deactivate(&mut self, v: NodeId) {
        self.balls[v] = None;
    }
}

/// One admission-filtered, depth-capped decremental BFS tree.
#[derive(Debug)]
pub struct LightTree {
    source: NodeId,
    scale: u32,
    depth_cap: Dist,
    level: Vec<Dist>,
    parent: Vec<Option<NodeId>>,
    children: Vec<BTreeSet<NodeId>>,
    scans: u64,
    edge_touches: u64,
    admissions: u64,
    removals: u64,
    exclusions: [u64; 3],
    cap_exclusions: u64,
}

impl LightTree {
    fn new_empty(n: usize, source: NodeId, scale: u32) -> Self {
        let depth_cap = (1usize << scale).min(n.saturating_sub(1));
        LightTree {
            source,
            scale,
            depth_cap,
            level: vec![INF; n],
            parent: vec![None; n],
            children: vec![BTreeSet::new(); n],
            scans: 0,
            edge_touches: 0,
            admissions: 0,
            removals: 0,
            exclusions: [0; 3],
            cap_exclusions: 0,
        }
    }

    fn build(
        g: &DynamicGraph,
        source: NodeId,
        scale: u32,
        relay: &RelayHeaps,
        balls: &BallRegistry,
        events: &mut Vec<MembershipEvent>,
    ) -> Result<Self, StaleCover> {
        let mut t = Self::new_empty(g.n(), source, scale);
        t.level[source] = 0;
        t.emit(events, source, MembershipChange::Added { level: 0 });
        let mut queue = BinaryHeap::new();
        for w in g.neighbors(source) {
            queue.push(Reverse((1, w)));
        }
        t.admission_sweep(g, queue, relay, balls, events)?;
        Ok(t)
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn depth_cap(&self) -> Dist {
        self.depth_cap
    }

    pub fn level(&self, v: NodeId) -> Dist {
        self.level[v]
    }

    pub fn in_tree(&self, v: NodeId) -> bool {
        self.level[v] < INF
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v]
    }

    /// Live members with their levels, ascending by node.
    pub fn members(&self) -> Vec<(NodeId, Dist)> {
        self.level
            .iter()
            .enumerate()
            .filter(|(_, &l)| l < INF)
            .map(|(v, &l)| (v, l))
            .collect()
    }

    pub fn member_count(&self) -> usize {
        self.level.iter().filter(|&&l| l < INF).count()
    }

    /// Runs the exclusion tests for candidate level `d`. Light means the
    /// node may be admitted or kept at that level.
    pub fn admission_check(
        &self,
        w: NodeId,
        d: Dist,
        relay: &RelayHeaps,
        balls: &BallRegistry,
    ) -> Result<AdmissionVerdict, StaleCover> {
        let params = relay.params();
        if (d as f64) <= params.short_range() {
            let m = relay.short_min(w, self.source);
            return Ok(if m < INF && m <= d + 2 {
                AdmissionVerdict::NotLight(ExclusionTest::ShortRelay)
            } else {
                AdmissionVerdict::Light
            });
        }
        if relay.dist_to_q(w) > params.beta {
            let Some(ball) = balls.ball(w) else {
                return Err(StaleCover { node: w });
            };
            let one_plus = params.one_plus_eps();
            for (member, &blevel) in ball.levels().iter().enumerate() {
                // The candidate itself (blevel 0) would reduce this test to
                // the scale-cover test below; a detour needs another node.
                if member == w || blevel >= INF || self.level[member] < INF {
                    continue;
                }
                let sm = relay.scale_min(member, self.source, self.scale);
                if sm < INF && (d as f64) >= blevel as f64 + sm as f64 / one_plus {
                    return Ok(AdmissionVerdict::NotLight(ExclusionTest::BallDetour));
                }
            }
        }
        let sm = relay.scale_min(w, self.source, self.scale);
        if sm < INF && (d as f64) * params.one_plus_eps() >= sm as f64 {
            return Ok(AdmissionVerdict::NotLight(ExclusionTest::ScaleCover));
        }
        Ok(AdmissionVerdict::Light)
    }

    fn emit(&self, events: &mut Vec<MembershipEvent>, node: NodeId, change: MembershipChange) {
        events.push(MembershipEvent {
            source: self.source,
            scale: self.scale,
            node,
            change,
        });
    }

    /// Best attachment for w: minimum live-neighbor level + 1, lowest id
    /// breaking ties. None when no in-tree neighbor exists.
    fn frontier(&mut self, g: &DynamicGraph, w: NodeId) -> Option<(Dist, NodeId)> {
        let mut best: Option<(Dist, NodeId)> = None;
        for u in g.neighbors(w) {
            self.edge_touches += 1;
            if self.level[u] < INF {
                let cand = (self.level[u] + 1, u);
                if best.map_or(true, |b| cand < b) {
                    best = Some(cand);
                }
            }
        }
        best
    }

    /// Orphan cascade after the deletion of (u, v), already gone from `g`.
    fn on_delete(
        &mut self,
        g: &DynamicGraph,
        u: NodeId,
        v: NodeId,
        relay: &RelayHeaps,
        balls: &BallRegistry,
        events: &mut Vec<MembershipEvent>,
    ) -> Result<(), StaleCover> {
        let mut queue = BinaryHeap::new();
        for (a, b) in [(u, v), (v, u)] {
            if self.parent[a] == Some(b) {
                self.parent[a] = None;
                self.children[b].remove(&a);
                queue.push(Reverse((self.level[a], a)));
            }
        }
        if queue.is_empty() {
            return Ok(());
        }

        let mut moved: BTreeMap<NodeId, Dist> = BTreeMap::new();
        while let Some(Reverse((l, w))) = queue.pop() {
            if self.level[w] != l || self.parent[w].is_some() {
                continue;
            }
            let best = self.frontier(g, w);
            if let Some((d, z)) = best {
                if d == l {
                    self.parent[w] = Some(z);
                    self.children[z].insert(w);
                    continue;
                }
            }
            // w must rise or leave: children become orphans either way.
            self.scans += 1;
            moved.entry(w).or_insert(l);
            for c in std::mem::take(&mut self.children[w]) {
                self.parent[c] = None;
                queue.push(Reverse((self.level[c], c)));
            }
            match best {
                Some((d, _)) if d <= self.depth_cap => {
                    match self.admission_check(w, d, relay, balls)? {
                        AdmissionVerdict::Light => {
                            self.level[w] = d;
                            queue.push(Reverse((d, w)));
                        }
                        AdmissionVerdict::NotLight(t) => {
                            self.exclusions[t as usize] += 1;
                            self.level[w] = INF;
                        }
                    }
                }
                Some(_) => {
                    self.cap_exclusions += 1;
                    self.level[w] = INF;
                }
                None => {
                    self.level[w] = INF;
                }
            }
        }

        for (node, old) in moved {
            let new = self.level[node];
            if new >= INF {
                self.removals += 1;
                self.emit(events, node, MembershipChange::Removed { old });
            } else if new != old {
                self.emit(events, node, MembershipChange::LevelChanged { old, new });
            }
        }
        Ok(())
    }

    /// Admission sweep: pops candidates in level order, recomputing the
    /// frontier fresh, and admits every candidate that passes the tests,
    /// spreading to its still-outside neighbors.
    fn admission_sweep(
        &mut self,
        g: &DynamicGraph,
        mut queue: BinaryHeap<Reverse<(Dist, NodeId)>>,
        relay: &RelayHeaps,
        balls: &BallRegistry,
        events: &mut Vec<MembershipEvent>,
    ) -> Result<(), StaleCover> {
        while let Some(Reverse((_, x))) = queue.pop() {
            if self.level[x] < INF {
                continue;
            }
            let Some((d, z)) = self.frontier(g, x) else {
                continue;
            };
            if d > self.depth_cap {
                continue;
            }
            self.scans += 1;
            match self.admission_check(x, d, relay, balls)? {
                AdmissionVerdict::NotLight(t) => {
                    self.exclusions[t as usize] += 1;
                }
                AdmissionVerdict::Light => {
                    self.level[x] = d;
                    self.parent[x] = Some(z);
                    self.children[z].insert(x);
                    self.admissions += 1;
                    self.emit(events, x, MembershipChange::Added { level: d });
                    if d < self.depth_cap {
                        for y in g.neighbors(x) {
                            if self.level[y] >= INF {
                                queue.push(Reverse((d + 1, y)));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn readmit(
        &mut self,
        g: &DynamicGraph,
        seeds: &[NodeId],
        relay: &RelayHeaps,
        balls: &BallRegistry,
        events: &mut Vec<MembershipEvent>,
    ) -> Result<(), StaleCover> {
        let mut queue = BinaryHeap::new();
        for &x in seeds {
            if x == self.source || self.level[x] < INF {
                continue;
            }
            if let Some((d, _)) = self.frontier(g, x) {
                if d <= self.depth_cap {
                    queue.push(Reverse((d, x)));
                }
            }
        }
        if queue.is_empty() {
            return Ok(());
        }
        self.admission_sweep(g, queue, relay, balls, events)
    }

    /// Structural soundness: parent/child/level consistency against the
    /// live graph. Level exactness is checked elsewhere.
    pub fn structure_ok(&self, g: &DynamicGraph) -> bool {
        let n = g.n();
        if self.level[self.source] != 0 || self.parent[self.source].is_some() {
            return false;
        }
        for v in 0..n {
            if self.level[v] >= INF {
                if self.parent[v].is_some() || !self.children[v].is_empty() {
                    return false;
                }
                continue;
            }
            if self.level[v] > self.depth_cap {
                return false;
            }
            if v != self.source {
                let Some(p) = self.parent[v] else {
                    return false;
                };
                if self.level[p] + 1 != self.level[v]
                    || !g.has_edge(p, v)
                    || !self.children[p].contains(&v)
                {
                    return false;
                }
            }
            for &c in &self.children[v] {
                if self.parent[c] != Some(v) {
                    return false;
                }
            }
        }
        true
    }

    pub(crate) fn corrupt_level(&mut self, v: NodeId, value: Dist) {
        self.level[v] = value;
    }
}

/// Aggregated counters over every tree and ball.
#[derive(Debug, Default, Clone, Copy)]
pub struct LightCounters {
    pub tree_count: u64,
    pub members: u64,
    pub scans: u64,
    pub edge_touches: u64,
    pub admissions: u64,
    pub removals: u64,
    pub short_relay_exclusions: u64,
    pub ball_detour_exclusions: u64,
    pub scale_cover_exclusions: u64,
    pub cap_exclusions: u64,
    pub active_balls: u64,
    pub ball_activations: u64,
    pub ball_touches: u64,
}

impl LightCounters {
    pub fn work(&self) -> u64 {
        self.scans + self.edge_touches + self.ball_touches
    }
}

/// All scale trees plus the ball registry, advanced in lock-step with the
/// graph and the relay layer.
#[derive(Debug)]
pub struct LightForest {
    trees: Vec<Vec<LightTree>>,
    s_pos: Vec<BTreeMap<NodeId, usize>>,
    balls: BallRegistry,
}

impl LightForest {
    /// Builds balls first (tests may consult them), then every tree in
    /// (scale, source) order. Returns the initial membership events.
    pub fn build(
        g: &DynamicGraph,
        relay: &RelayHeaps,
        sets: &SampleSets,
    ) -> Result<(Self, Vec<MembershipEvent>), StaleCover> {
        let balls = BallRegistry::build(g, relay);
        let mut events = Vec::new();
        let mut trees = Vec::new();
        let mut s_pos = Vec::new();
        for i in 1..=sets.i_max() {
            let mut row = Vec::new();
            let mut pos = BTreeMap::new();
            for (p, &s) in sets.s_level(i).iter().enumerate() {
                row.push(LightTree::build(g, s, i, relay, &balls, &mut events)?);
                pos.insert(s, p);
            }
            trees.push(row);
            s_pos.push(pos);
        }
        Ok((
            LightForest {
                trees,
                s_pos,
                balls,
            },
            events,
        ))
    }

    /// Advances balls and every tree past one deletion, then runs the
    /// re-admission sweeps seeded by the relay-minimum rises.
    pub fn apply_deletion(
        &mut self,
        g: &DynamicGraph,
        u: NodeId,
        v: NodeId,
        relay: &RelayHeaps,
        outcome: &RelayOutcome,
        sets: &SampleSets,
    ) -> Result<Vec<MembershipEvent>, StaleCover> {
        let mut events = Vec::new();
        self.balls.on_delete(g, u, v);
        let beta = self.balls.beta();
        for ch in &outcome.dist_to_q_changes {
            if ch.old <= beta && ch.new > beta {
                self.balls.activate(g, ch.node);
            }
        }

        let Self { trees, balls, .. } = self;
        for row in trees.iter_mut() {
            for t in row.iter_mut() {
                t.on_delete(g, u, v, relay, balls, &mut events)?;
            }
        }

        // Re-admission candidates: every (scale, source, node) whose
        // exclusion proof may have expired because a relay minimum rose.
        let mut cands: BTreeSet<(u32, NodeId, NodeId)> = BTreeSet::new();
        for r in &outcome.scale_min_rises {
            cands.insert((r.scale, r.source, r.node));
        }
        for pr in &outcome.pair_min_rises {
            for i in 1..=sets.i_max() {
                if sets.in_s(i, pr.y) && pr.x != pr.y {
                    cands.insert((i, pr.y, pr.x));
                }
                if sets.in_s(i, pr.x) && pr.x != pr.y {
                    cands.insert((i, pr.x, pr.y));
                }
            }
        }
        let mut iter = cands.into_iter().peekable();
        while let Some(&(i, s, _)) = iter.peek() {
            let mut seeds = Vec::new();
            while let Some(&(i2, s2, x)) = iter.peek() {
                if i2 != i || s2 != s {
                    break;
                }
                seeds.push(x);
                iter.next();
            }
            if let Some(&pos) = self.s_pos[(i - 1) as usize].get(&s) {
                let t = &mut self.trees[(i - 1) as usize][pos];
                t.readmit(g, &seeds, relay, &self.balls, &mut events)?;
            }
        }
        Ok(events)
    }

    pub fn tree(&self, i: u32, s: NodeId) -> Option<&LightTree> {
        let li = (i as usize).checked_sub(1)?;
        let pos = *self.s_pos.get(li)?.get(&s)?;
        Some(&self.trees[li][pos])
    }

    pub fn trees_at(&self, i: u32) -> &[LightTree] {
        &self.trees[(i - 1) as usize]
    }

    pub fn i_max(&self) -> u32 {
        self.trees.len() as u32
    }

    pub fn balls(&self) -> &BallRegistry {
        &self.balls
    }

    pub fn counters(&self) -> LightCounters {
        let mut c = LightCounters::default();
        for row in &self.trees {
            for t in row {
                c.tree_count += 1;
                c.members += t.member_count() as u64;
                c.scans += t.scans;
                c.edge_touches += t.edge_touches;
                c.admissions += t.admissions;
                c.removals += t.removals;
                c.short_relay_exclusions += t.exclusions[ExclusionTest::ShortRelay as usize];
                c.ball_detour_exclusions += t.exclusions[ExclusionTest::BallDetour as usize];
                c.scale_cover_exclusions += t.exclusions[ExclusionTest::ScaleCover as usize];
                c.cap_exclusions += t.cap_exclusions;
            }
        }
        c.active_balls = self.balls.active_count() as u64;
        c.ball_activations = self.balls.activations();
        c.ball_touches = self.balls.edge_touches();
        c
    }

    pub(crate) fn corrupt_tree_level(&mut self, i: u32, s: NodeId, v: NodeId, value: Dist) {
        let li = (i - 1) as usize;
        let pos = self.s_pos[li][&s];
        self.trees[li][pos].corrupt_level(v, value);
    }

    pub(crate) fn corrupt_ball_deactivate(&mut self, center: NodeId) {
        self.balls.corrupt_deactivate(center);
    }
}
