//! Relayed-distance bookkeeping over the landmark sample.
//!
//! For nodes x, y and a landmark q, the relayed sum dist(x, q) + dist(q, y)
//! upper-bounds dist(x, y) and is cheap to maintain under deletions because
//! each side is a single-source distance. This module keeps three keyed
//! minimum families over the landmark sample Q:
//!
//! * **short family** — exact relayed sums, kept only while they stay below
//!   the short-range cutoff, updated eagerly from depth-capped landmark
//!   trees. Its per-pair minimum is exact for every pair whose best relay
//!   is short.
//! * **lazy family** — relayed sums over provider estimates, kept for all
//!   finite values. A side is rewritten only when its estimate grows by a
//!   (1+eps) factor since the last rewrite, so each stored sum is stale by
//!   at most (1+eps) per side.
//! * **scale family** — relayed sums between every node and each scale
//!   sample source s in S_i, kept only while they stay within the scale
//!   cap (1+eps)*2^i. Once a value leaves the cap it is evicted for good;
//!   the per-key minimum can therefore only rise.
//!
//! The struct also owns the depth-capped landmark trees, the per-landmark
//! distance providers, and the maintained distance-to-Q array, and reports
//! every minimum rise so that downstream structures can re-examine nodes
//! whose exclusion proof may have expired.

use std::collections::BTreeSet;

use crate::dist::{dist_add, Dist, INF};
use crate::estree::EsTree;
use crate::graph::{DynamicGraph, NodeId};
use crate::provider::{DistanceProvider, ExactProvider, ProviderParams};
use crate::qheap::QSlotHeap;
use crate::sampling::SampleSets;

/// Index of the unordered pair (x, y), diagonal included, in a dense
/// triangular layout of n*(n+1)/2 cells.
#[inline]
fn pair_index(n: usize, x: NodeId, y: NodeId) -> usize {
    let (a, b) = if x <= y { (x, y) } else { (y, x) };
    a * n - (a * a - a) / 2 + (b - a)
}

#[inline]
fn pair_count(n: usize) -> usize {
    n * (n + 1) / 2
}

/// A landmark-tree level increase (depth-capped tree).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactLevelRise {
    pub q_slot: usize,
    pub node: NodeId,
    pub old: Dist,
    pub new: Dist,
}

/// A provider estimate increase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimateRise {
    pub q_slot: usize,
    pub node: NodeId,
    pub new_estimate: Dist,
}

/// dist(v, Q) changed (it can only grow).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistToQChange {
    pub node: NodeId,
    pub old: Dist,
    pub new: Dist,
}

/// The short-family minimum for this pair grew.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PairMinRise {
    pub x: NodeId,
    pub y: NodeId,
}

/// The scale-family minimum for (node, source in S_scale) grew.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ScaleMinRise {
    pub node: NodeId,
    pub scale: u32,
    pub source: NodeId,
}

/// Everything one deletion did to the relay layer.
#[derive(Debug, Default)]
pub struct RelayOutcome {
    pub exact_rises: Vec<ExactLevelRise>,
    pub estimate_rises: Vec<EstimateRise>,
    pub dist_to_q_changes: Vec<DistToQChange>,
    pub pair_min_rises: Vec<PairMinRise>,
    pub scale_min_rises: Vec<ScaleMinRise>,
}

/// Flat counters for work accounting and diagnostics.
#[derive(Debug, Default, Clone, Copy)]
pub struct RelayCounters {
    pub landmark_tree_touches: u64,
    pub provider_touches: u64,
    pub short_probes: u64,
    pub short_writes: u64,
    pub short_evictions: u64,
    pub short_entries: u64,
    pub short_peak_entries: u64,
    pub lazy_probes: u64,
    pub lazy_writes: u64,
    pub lazy_evictions: u64,
    pub lazy_refreshes: u64,
    pub lazy_entries: u64,
    pub lazy_peak_entries: u64,
    pub scale_probes: u64,
    pub scale_writes: u64,
    pub scale_evictions: u64,
    pub scale_entries: u64,
    pub scale_peak_entries: u64,
    pub blocked_reinserts: u64,
}

impl RelayCounters {
    /// Total update work performed by the relay layer so far.
    pub fn work(&self) -> u64 {
        self.landmark_tree_touches
            + self.provider_touches
            + self.short_probes
            + self.short_writes
            + self.lazy_probes
            + self.lazy_writes
            + self.scale_probes
            + self.scale_writes
    }
}

/// Dense per-pair family of slot heaps, one heap per unordered node pair.
#[derive(Debug)]
struct PairFamily {
    n: usize,
    slots: usize,
    /// Values above the cap are dropped; INF always evicts.
    cap: Dist,
    /// When false, minimum rises are not tracked (saves stamp work).
    track_rises: bool,
    heaps: Vec<Option<QSlotHeap>>,
    stamp: Vec<u32>,
    touched: Vec<(usize, NodeId, NodeId, Dist)>,
    entries: u64,
    peak_entries: u64,
    probes: u64,
    writes: u64,
    evictions: u64,
    blocked_reinserts: u64,
}

impl PairFamily {
    fn new(n: usize, slots: usize, cap: Dist, track_rises: bool) -> Self {
        let cells = pair_count(n);
        PairFamily {
            n,
            slots,
            cap,
            track_rises,
            heaps: vec![None; cells],
            stamp: if track_rises { vec![0; cells] } else { Vec::new() },
            touched: Vec::new(),
            entries: 0,
            peak_entries: 0,
            probes: 0,
            writes: 0,
            evictions: 0,
            blocked_reinserts: 0,
        }
    }

    fn init_insert(&mut self, x: NodeId, y: NodeId, slot: usize, value: Dist) {
        if value >= INF || value > self.cap {
            return;
        }
        let idx = pair_index(self.n, x, y);
        let h = self.heaps[idx].get_or_insert_with(|| QSlotHeap::new(self.slots));
        debug_assert!(!h.contains(slot));
        h.set(slot, value);
        self.entries += 1;
        self.peak_entries = self.peak_entries.max(self.entries);
    }

    fn min(&self, x: NodeId, y: NodeId) -> Dist {
        self.heaps[pair_index(self.n, x, y)]
            .as_ref()
            .map_or(INF, |h| h.min_value())
    }

    fn get(&self, x: NodeId, y: NodeId, slot: usize) -> Option<Dist> {
        self.heaps[pair_index(self.n, x, y)]
            .as_ref()
            .and_then(|h| h.get(slot))
    }

    fn entries_of(&self, x: NodeId, y: NodeId) -> Vec<(usize, Dist)> {
        self.heaps[pair_index(self.n, x, y)]
            .as_ref()
            .map_or_else(Vec::new, |h| h.iter().collect())
    }

    /// Applies one recomputed sum: live values are updated or evicted;
    /// absent slots are never (re-)inserted after construction.
    fn update(&mut self, x: NodeId, y: NodeId, slot: usize, sum: Dist, round: u32) {
        self.probes += 1;
        let idx = pair_index(self.n, x, y);
        let live = self.heaps[idx]
            .as_ref()
            .map_or(false, |h| h.contains(slot));
        if !live {
            if sum < INF && sum <= self.cap {
                // Only reachable if a relayed sum shrank, which monotone
                // providers never produce.
                self.blocked_reinserts += 1;
            }
            return;
        }
        if self.track_rises && self.stamp[idx] != round {
            self.stamp[idx] = round;
            let old = self.heaps[idx].as_ref().unwrap().min_value();
            self.touched.push((idx, x.min(y), x.max(y), old));
        }
        let h = self.heaps[idx].as_mut().unwrap();
        if sum >= INF || sum > self.cap {
            h.remove(slot);
            self.entries -= 1;
            self.evictions += 1;
        } else {
            debug_assert!(h.get(slot).map_or(true, |old| sum >= old));
            h.set(slot, sum);
            self.writes += 1;
        }
    }

    fn collect_rises(&mut self) -> Vec<PairMinRise> {
        let mut out = Vec::new();
        for (idx, x, y, old) in self.touched.drain(..) {
            let new = self.heaps[idx].as_ref().map_or(INF, |h| h.min_value());
            if new > old {
                out.push(PairMinRise { x, y });
            }
        }
        out.sort_unstable();
        out
    }

    pub(crate) fn corrupt_set(&mut self, x: NodeId, y: NodeId, slot: usize, value: Dist) {
        let idx = pair_index(self.n, x, y);
        let h = self.heaps[idx].get_or_insert_with(|| QSlotHeap::new(self.slots));
        h.set(slot, value);
    }
}

/// Lazy family: the pair heaps plus the per-(node, landmark) estimate that
/// was current at the last rewrite of that side.
#[derive(Debug)]
struct LazyFamily {
    n: usize,
    slots: usize,
    pairs: PairFamily,
    d_last: Vec<Dist>,
    refreshes: u64,
}

impl LazyFamily {
    fn apply<F: Fn(usize, NodeId) -> Dist>(
        &mut self,
        rises: &[EstimateRise],
        est: F,
        one_plus_eps: f64,
        round: u32,
    ) {
        for r in rises {
            let cell = r.node * self.slots + r.q_slot;
            let dl = self.d_last[cell];
            if dl >= INF {
                continue;
            }
            let triggered =
                r.new_estimate >= INF || (r.new_estimate as f64) >= one_plus_eps * (dl as f64);
            if !triggered {
                continue;
            }
            self.d_last[cell] = r.new_estimate;
            self.refreshes += 1;
            for y in 0..self.n {
                let sum = dist_add(r.new_estimate, est(r.q_slot, y));
                self.pairs.update(r.node, y, r.q_slot, sum, round);
            }
        }
    }
}

/// One scale: sources S_i, cap (1+eps)*2^i, one heap per (node, source).
#[derive(Debug)]
struct ScaleLevel {
    cap: Dist,
    s_list: Vec<NodeId>,
    s_pos: Vec<u32>,
    heaps: Vec<Option<QSlotHeap>>,
    stamp: Vec<u32>,
    /// Live entries per node row / per source column; zero rows and
    /// columns are skipped entirely during updates.
    row_entries: Vec<u32>,
    col_entries: Vec<u32>,
}

#[derive(Debug)]
struct ScaleFamily {
    n: usize,
    slots: usize,
    levels: Vec<ScaleLevel>,
    touched: Vec<(usize, usize, Dist)>,
    entries: u64,
    peak_entries: u64,
    probes: u64,
    writes: u64,
    evictions: u64,
    blocked_reinserts: u64,
}

impl ScaleFamily {
    fn new(n: usize, slots: usize, params: &ProviderParams, sets: &SampleSets) -> Self {
        let mut levels = Vec::new();
        for i in 1..=sets.i_max() {
            let s_list: Vec<NodeId> = sets.s_level(i).to_vec();
            let mut s_pos = vec![u32::MAX; n];
            for (pos, &s) in s_list.iter().enumerate() {
                s_pos[s] = pos as u32;
            }
            let cells = n * s_list.len();
            let cols = s_list.len();
            levels.push(ScaleLevel {
                cap: params.star_keep_max(i),
                s_list,
                s_pos,
                heaps: vec![None; cells],
                stamp: vec![0; cells],
                row_entries: vec![0; n],
                col_entries: vec![0; cols],
            });
        }
        ScaleFamily {
            n,
            slots,
            levels,
            touched: Vec::new(),
            entries: 0,
            peak_entries: 0,
            probes: 0,
            writes: 0,
            evictions: 0,
            blocked_reinserts: 0,
        }
    }

    fn init_insert(&mut self, li: usize, x: NodeId, pos: usize, slot: usize, value: Dist) {
        let level = &mut self.levels[li];
        if value >= INF || value > level.cap {
            return;
        }
        let idx = x * level.s_list.len() + pos;
        let h = level.heaps[idx].get_or_insert_with(|| QSlotHeap::new(self.slots));
        debug_assert!(!h.contains(slot));
        h.set(slot, value);
        level.row_entries[x] += 1;
        level.col_entries[pos] += 1;
        self.entries += 1;
        self.peak_entries = self.peak_entries.max(self.entries);
    }

    fn update(&mut self, li: usize, x: NodeId, pos: usize, slot: usize, sum: Dist, round: u32) {
        self.probes += 1;
        let level = &mut self.levels[li];
        let idx = x * level.s_list.len() + pos;
        let live = level.heaps[idx]
            .as_ref()
            .map_or(false, |h| h.contains(slot));
        if !live {
            if sum < INF && sum <= level.cap {
                self.blocked_reinserts += 1;
            }
            return;
        }
        if level.stamp[idx] != round {
            level.stamp[idx] = round;
            let old = level.heaps[idx].as_ref().unwrap().min_value();
            self.touched.push((li, idx, old));
        }
        let h = level.heaps[idx].as_mut().unwrap();
        if sum >= INF || sum > level.cap {
            h.remove(slot);
            level.row_entries[x] -= 1;
            level.col_entries[pos] -= 1;
            self.entries -= 1;
            self.evictions += 1;
        } else {
            debug_assert!(h.get(slot).map_or(true, |old| sum >= old));
            h.set(slot, sum);
            self.writes += 1;
        }
    }

    fn apply<F: Fn(usize, NodeId) -> Dist + Copy>(
        &mut self,
        rises: &[EstimateRise],
        est: F,
        round: u32,
    ) {
        for r in rises {
            // The risen node seen as the free endpoint x, against every
            // scale source.
            for li in 0..self.levels.len() {
                if self.levels[li].row_entries[r.node] == 0 {
                    continue;
                }
                let cols = self.levels[li].s_list.len();
                for pos in 0..cols {
                    let s = self.levels[li].s_list[pos];
                    let sum = dist_add(r.new_estimate, est(r.q_slot, s));
                    self.update(li, r.node, pos, r.q_slot, sum, round);
                }
            }
            // The risen node seen as a scale source, against every x.
            for li in 0..self.levels.len() {
                let pos = self.levels[li].s_pos[r.node];
                if pos == u32::MAX {
                    continue;
                }
                let pos = pos as usize;
                if self.levels[li].col_entries[pos] == 0 {
                    continue;
                }
                for x in 0..self.n {
                    let sum = dist_add(est(r.q_slot, x), r.new_estimate);
                    self.update(li, x, pos, r.q_slot, sum, round);
                }
            }
        }
    }

    fn collect_rises(&mut self) -> Vec<ScaleMinRise> {
        let mut raw: Vec<(usize, usize, Dist)> = self.touched.drain(..).collect();
        raw.sort_unstable_by_key(|&(li, idx, _)| (li, idx));
        let mut out = Vec::new();
        for (li, idx, old) in raw {
            let level = &self.levels[li];
            let new = level.heaps[idx].as_ref().map_or(INF, |h| h.min_value());
            if new > old {
                let cols = level.s_list.len();
                out.push(ScaleMinRise {
                    node: idx / cols,
                    scale: (li + 1) as u32,
                    source: level.s_list[idx % cols],
                });
            }
        }
        out
    }

    fn min(&self, x: NodeId, s: NodeId, i: u32) -> Dist {
        let Some(level) = self.levels.get((i as usize).wrapping_sub(1)) else {
            return INF;
        };
        let pos = level.s_pos[s];
        if pos == u32::MAX {
            return INF;
        }
        level.heaps[x * level.s_list.len() + pos as usize]
            .as_ref()
            .map_or(INF, |h| h.min_value())
    }

    fn entries_of(&self, x: NodeId, s: NodeId, i: u32) -> Option<Vec<(usize, Dist)>> {
        let level = self.levels.get((i as usize).wrapping_sub(1))?;
        let pos = level.s_pos[s];
        if pos == u32::MAX {
            return None;
        }
        Some(
            level.heaps[x * level.s_list.len() + pos as usize]
                .as_ref()
                .map_or_else(Vec::new, |h| h.iter().collect()),
        )
    }
}

/// The relay layer: landmark trees, providers, distance-to-Q, and the
/// three pair/scale families, advanced in lock-step with the graph.
#[derive(Debug)]
pub struct RelayHeaps {
    n: usize,
    params: ProviderParams,
    q_list: Vec<NodeId>,
    exact: Vec<EsTree>,
    providers: Vec<ExactProvider>,
    dist_to_q: Vec<Dist>,
    short: PairFamily,
    lazy: LazyFamily,
    scale: ScaleFamily,
    round: u32,
}

impl RelayHeaps {
    pub fn build(g: &DynamicGraph, params: &ProviderParams, sets: &SampleSets) -> Self {
        let n = g.n();
        let q_list: Vec<NodeId> = sets.q_list().to_vec();
        let slots = q_list.len();
        let exact: Vec<EsTree> = q_list
            .iter()
            .map(|&q| EsTree::build(g, q, params.exact_depth()))
            .collect();
        let providers: Vec<ExactProvider> =
            q_list.iter().map(|&q| ExactProvider::build(g, q)).collect();
        let dist_to_q: Vec<Dist> = (0..n)
            .map(|v| exact.iter().map(|t| t.level(v)).min().unwrap_or(INF))
            .collect();

        let mut short = PairFamily::new(n, slots, params.short_keep_max(), true);
        let exact_rows: Vec<&[Dist]> = exact.iter().map(|t| t.levels()).collect();
        for x in 0..n {
            for y in x..n {
                for (slot, row) in exact_rows.iter().enumerate() {
                    short.init_insert(x, y, slot, dist_add(row[x], row[y]));
                }
            }
        }

        let mut lazy = LazyFamily {
            n,
            slots,
            pairs: PairFamily::new(n, slots, INF, false),
            d_last: vec![INF; n * slots],
            refreshes: 0,
        };
        let est_rows: Vec<Vec<Dist>> = providers
            .iter()
            .map(|p| (0..n).map(|v| p.estimate(v)).collect())
            .collect();
        for x in 0..n {
            for (slot, row) in est_rows.iter().enumerate() {
                lazy.d_last[x * slots + slot] = row[x];
            }
            for y in x..n {
                for (slot, row) in est_rows.iter().enumerate() {
                    lazy.pairs.init_insert(x, y, slot, dist_add(row[x], row[y]));
                }
            }
        }

        let mut scale = ScaleFamily::new(n, slots, params, sets);
        for li in 0..scale.levels.len() {
            let s_list = scale.levels[li].s_list.clone();
            for x in 0..n {
                for (pos, &s) in s_list.iter().enumerate() {
                    for (slot, row) in est_rows.iter().enumerate() {
                        scale.init_insert(li, x, pos, slot, dist_add(row[x], row[s]));
                    }
                }
            }
        }

        RelayHeaps {
            n,
            params: params.clone(),
            q_list,
            exact,
            providers,
            dist_to_q,
            short,
            lazy,
            scale,
            round: 0,
        }
    }

    /// Advances every structure past the deletion of (u, v), which must
    /// already be gone from `g`. Returns all observable changes.
    pub fn apply_deletion(&mut self, g: &DynamicGraph, u: NodeId, v: NodeId) -> RelayOutcome {
        debug_assert!(!g.has_edge(u, v));
        self.round += 1;
        let round = self.round;

        let mut exact_rises = Vec::new();
        for (q_slot, tree) in self.exact.iter_mut().enumerate() {
            for ch in tree.on_delete(g, u, v) {
                exact_rises.push(ExactLevelRise {
                    q_slot,
                    node: ch.node,
                    old: ch.old,
                    new: ch.new,
                });
            }
        }
        let mut estimate_rises = Vec::new();
        for (q_slot, p) in self.providers.iter_mut().enumerate() {
            for r in p.on_delete(g, u, v) {
                estimate_rises.push(EstimateRise {
                    q_slot,
                    node: r.node,
                    new_estimate: r.new_estimate,
                });
            }
        }

        let Self {
            exact,
            providers,
            short,
            lazy,
            scale,
            dist_to_q,
            params,
            n,
            ..
        } = self;
        let exact_ref: &[EsTree] = exact;
        let prov_ref: &[ExactProvider] = providers;
        let levels = |q: usize, w: NodeId| exact_ref[q].level(w);
        let est = |q: usize, w: NodeId| prov_ref[q].estimate(w);

        // Short family: eager rewrite of every pair that contains a risen
        // node, from the current (already updated) tree levels.
        for r in &exact_rises {
            for y in 0..*n {
                short.update(r.node, y, r.q_slot, dist_add(r.new, levels(r.q_slot, y)), round);
            }
        }

        // Distance to the landmark set; only nodes with a tree rise can
        // have moved.
        let mut dist_to_q_changes = Vec::new();
        let changed: BTreeSet<NodeId> = exact_rises.iter().map(|r| r.node).collect();
        for node in changed {
            let new = exact_ref.iter().map(|t| t.level(node)).min().unwrap_or(INF);
            let old = dist_to_q[node];
            if new != old {
                debug_assert!(new > old);
                dist_to_q[node] = new;
                dist_to_q_changes.push(DistToQChange { node, old, new });
            }
        }

        lazy.apply(&estimate_rises, est, params.one_plus_eps(), round);
        scale.apply(&estimate_rises, est, round);

        let pair_min_rises = short.collect_rises();
        let scale_min_rises = scale.collect_rises();

        RelayOutcome {
            exact_rises,
            estimate_rises,
            dist_to_q_changes,
            pair_min_rises,
            scale_min_rises,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> &ProviderParams {
        &self.params
    }

    pub fn q_list(&self) -> &[NodeId] {
        &self.q_list
    }

    /// Level of v in the depth-capped tree of landmark slot `q_slot`.
    pub fn landmark_level(&self, q_slot: usize, v: NodeId) -> Dist {
        self.exact[q_slot].level(v)
    }

    pub fn landmark_tree(&self, q_slot: usize) -> &EsTree {
        &self.exact[q_slot]
    }

    /// Provider estimate of dist(q, v) for landmark slot `q_slot`.
    pub fn estimate(&self, q_slot: usize, v: NodeId) -> Dist {
        self.providers[q_slot].estimate(v)
    }

    pub fn provider(&self, q_slot: usize) -> &ExactProvider {
        &self.providers[q_slot]
    }

    /// Maintained dist(v, Q), saturating at INF beyond the tree depth cap.
    pub fn dist_to_q(&self, v: NodeId) -> Dist {
        self.dist_to_q[v]
    }

    /// Exact minimum short relayed sum for (x, y); INF if no landmark
    /// relays them within the short cutoff.
    pub fn short_min(&self, x: NodeId, y: NodeId) -> Dist {
        self.short.min(x, y)
    }

    /// Minimum stored lazy sum (stale by at most (1+eps) per side).
    pub fn lazy_min_raw(&self, x: NodeId, y: NodeId) -> Dist {
        self.lazy.pairs.min(x, y)
    }

    /// Lazy minimum scaled by (1+eps) and floored, making it an upper
    /// bound on the current best relayed sum.
    pub fn lazy_min_scaled(&self, x: NodeId, y: NodeId) -> Dist {
        let raw = self.lazy.pairs.min(x, y);
        if raw >= INF {
            INF
        } else {
            (self.params.one_plus_eps() * raw as f64).floor() as Dist
        }
    }

    /// Best landmark-relayed distance bound for (x, y).
    pub fn relay_estimate(&self, x: NodeId, y: NodeId) -> Dist {
        self.short_min(x, y).min(self.lazy_min_scaled(x, y))
    }

    /// Minimum capped relayed sum between x and scale source s in S_i.
    pub fn scale_min(&self, x: NodeId, s: NodeId, i: u32) -> Dist {
        self.scale.min(x, s, i)
    }

    pub fn i_max(&self) -> u32 {
        self.scale.levels.len() as u32
    }

    pub fn scale_sources(&self, i: u32) -> &[NodeId] {
        &self.scale.levels[(i - 1) as usize].s_list
    }

    /// Estimate that was current at the last lazy rewrite of (x, q_slot).
    pub fn last_refreshed_estimate(&self, x: NodeId, q_slot: usize) -> Dist {
        self.lazy.d_last[x * self.lazy.slots + q_slot]
    }

    pub fn short_entries(&self, x: NodeId, y: NodeId) -> Vec<(usize, Dist)> {
        self.short.entries_of(x, y)
    }

    pub fn lazy_entries(&self, x: NodeId, y: NodeId) -> Vec<(usize, Dist)> {
        self.lazy.pairs.entries_of(x, y)
    }

    pub fn scale_entries(&self, x: NodeId, s: NodeId, i: u32) -> Option<Vec<(usize, Dist)>> {
        self.scale.entries_of(x, s, i)
    }

    pub fn short_value(&self, x: NodeId, y: NodeId, q_slot: usize) -> Option<Dist> {
        self.short.get(x, y, q_slot)
    }

    pub fn counters(&self) -> RelayCounters {
        RelayCounters {
            landmark_tree_touches: self.exact.iter().map(|t| t.edge_touches()).sum(),
            provider_touches: self.providers.iter().map(|p| p.edge_touches()).sum(),
            short_probes: self.short.probes,
            short_writes: self.short.writes,
            short_evictions: self.short.evictions,
            short_entries: self.short.entries,
            short_peak_entries: self.short.peak_entries,
            lazy_probes: self.lazy.pairs.probes,
            lazy_writes: self.lazy.pairs.writes,
            lazy_evictions: self.lazy.pairs.evictions,
            lazy_refreshes: self.lazy.refreshes,
            lazy_entries: self.lazy.pairs.entries,
            lazy_peak_entries: self.lazy.pairs.peak_entries,
            scale_probes: self.scale.probes,
            scale_writes: self.scale.writes,
            scale_evictions: self.scale.evictions,
            scale_entries: self.scale.entries,
            scale_peak_entries: self.scale.peak_entries,
            blocked_reinserts: self.short.blocked_reinserts
                + self.lazy.pairs.blocked_reinserts
                + self.scale.blocked_reinserts,
        }
    }

    pub(crate) fn corrupt_landmark_level(&mut self, q_slot: usize, v: NodeId, value: Dist) {
        self.exact[q_slot].corrupt_level(v, value);
    }

    pub(crate) fn corrupt_provider_estimate(&mut self, q_slot: usize, v: NodeId, value: Dist) {
        self.providers[q_slot].corrupt_estimate(v, value);
    }

    pub(crate) fn corrupt_short_value(&mut self, x: NodeId, y: NodeId, q_slot: usize, value: Dist) {
        self.short.corrupt_set(x, y, q_slot, value);
    }

    pub(crate) fn corrupt_lazy_value(&mut self, x: NodeId, y: NodeId, q_slot: usize, value: Dist) {
        self.lazy.pairs.corrupt_set(x, y, q_slot, value);
    }

    pub(crate) fn corrupt_scale_value(
        &mut self,
        x: NodeId,
        s: NodeId,
        i: u32,
        q_slot: usize,
        value: Dist,
    ) {
        let level = &mut self.scale.levels[(i - 1) as usize];
        let pos = level.s_pos[s] as usize;
        let idx = x * level.s_list.len() + pos;
        let h = level.heaps[idx].get_or_insert_with(|| QSlotHeap::new(self.scale.slots));
        h.set(q_slot, value);
    }
}
