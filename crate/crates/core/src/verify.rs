//! Brute-force reference distances and the consistency checker.
//!
//! Everything here recomputes from the live graph with plain BFS, sharing
//! no state or code path with the incremental structures it judges, so a
//! bug on the incremental side cannot hide itself.

use std::collections::VecDeque;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dist::{dist_add, dist_str, Dist, INF};
use crate::graph::{DynamicGraph, NodeId};
use crate::oracle::Oracle;
use crate::sampling;

/// Frozen all-pairs view of one graph version.
#[derive(Debug, Clone)]
pub struct ExactSnapshot {
    version: u64,
    n: usize,
    dist: Vec<Vec<Dist>>,
    heavy: Vec<bool>,
}

/// Single-source BFS, the ground truth for every distance claim.
pub fn bfs_distances(g: &DynamicGraph, source: NodeId) -> Vec<Dist> {
    let mut dist = vec![INF; g.n()];
    dist[source] = 0;
    let mut queue = VecDeque::with_capacity(g.n());
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = dist[u];
        for v in g.neighbors(u) {
            if dist[v] == INF {
                dist[v] = du + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

impl ExactSnapshot {
    pub fn take(g: &DynamicGraph) -> Self {
        let n = g.n();
        let dist = (0..n).map(|s| bfs_distances(g, s)).collect();
        let heavy = (0..n).map(|v| g.is_heavy(v)).collect();
        ExactSnapshot {
            version: g.version(),
            n,
            dist,
            heavy,
        }
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist(&self, x: NodeId, y: NodeId) -> Dist {
        self.dist[x][y]
    }

    pub fn row(&self, x: NodeId) -> &[Dist] {
        &self.dist[x]
    }

    pub fn is_heavy(&self, v: NodeId) -> bool {
        self.heavy[v]
    }

    /// Largest finite distance from `v` (0 if `v` is isolated).
    pub fn eccentricity(&self, v: NodeId) -> Dist {
        self.dist[v]
            .iter()
            .copied()
            .filter(|&d| d < INF)
            .max()
            .unwrap_or(0)
    }

    /// Cheapest route through some currently-heavy relay node:
    /// min over heavy z of dist(x,z) + dist(z,y).
    pub fn heavy_dist(&self, x: NodeId, y: NodeId) -> Dist {
        let mut best = INF;
        for z in 0..self.n {
            if self.heavy[z] {
                best = best.min(dist_add(self.dist[x][z], self.dist[z][y]));
            }
        }
        best
    }
}

/// Shortest x-y path length among paths whose *internal* nodes are all
/// light; the endpoints may be heavy. BFS over light nodes, with one final
/// hop into y allowed from anywhere reached.
pub fn light_dist(g: &DynamicGraph, snap: &ExactSnapshot, x: NodeId, y: NodeId) -> Dist {
    if x == y {
        return 0;
    }
    let n = g.n();
    let mut dist = vec![INF; n];
    dist[x] = 0;
    let mut best = INF;
    let mut queue = VecDeque::new();
    queue.push_back(x);
    while let Some(u) = queue.pop_front() {
        let du = dist[u];
        if du + 1 >= best {
            continue;
        }
        for v in g.neighbors(u) {
            if v == y {
                best = best.min(du + 1);
            } else if dist[v] == INF && !snap.is_heavy(v) {
                dist[v] = du + 1;
                queue.push_back(v);
            }
        }
    }
    best
}

/// The snapshot was taken at a different graph version than the oracle is
/// at; the comparison would be meaningless.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("snapshot is for graph version {snapshot}, oracle is at {oracle}")]
pub struct VersionMismatch {
    pub snapshot: u64,
    pub oracle: u64,
}

/// Outcome of one full consistency sweep.
///
/// `violations` are hard findings: the state is provably wrong. `warnings`
/// hold stretch findings observed while the sampling audit was failing —
/// the accuracy guarantees are conditioned on the sample properties, so
/// those findings are reported but do not fail the sweep.
#[derive(Debug)]
pub struct ViolationReport {
    version: u64,
    checks: u64,
    audit_passed: bool,
    audit_violations: usize,
    violations: Vec<String>,
    warnings: Vec<String>,
}

impl ViolationReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    /// Individual comparisons performed.
    pub fn checks(&self) -> u64 {
        self.checks
    }

    pub fn audit_passed(&self) -> bool {
        self.audit_passed
    }

    pub fn audit_violations(&self) -> usize {
        self.audit_violations
    }

    pub fn violations(&self) -> &[String] {
        &self.violations
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn summary(&self) -> String {
        if self.passes() {
            format!(
                "ok: {} checks at version {} ({} warnings)",
                self.checks,
                self.version,
                self.warnings.len()
            )
        } else {
            format!(
                "FAIL: {} violations in {} checks at version {}; first: {}",
                self.violations.len(),
                self.checks,
                self.version,
                self.violations[0]
            )
        }
    }
}

/// Unordered node pairs (diagonal included) to exercise: every pair on
/// small graphs, a seeded sample on large ones.
fn pair_domain(n: usize) -> Vec<(NodeId, NodeId)> {
    if n <= 128 {
        (0..n)
            .flat_map(|x| (x..n).map(move |y| (x, y)))
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0xd15);
        (0..1000)
            .map(|_| {
                let x = rng.gen_range(0..n);
                let y = rng.gen_range(0..n);
                (x.min(y), x.max(y))
            })
            .collect()
    }
}

/// Ordered distinct pairs for query checks, same sizing policy.
fn query_domain(n: usize) -> Vec<(NodeId, NodeId)> {
    if n <= 128 {
        (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| x != y)
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0xc0de);
        (0..1000)
            .map(|_| loop {
                let x = rng.gen_range(0..n);
                let y = rng.gen_range(0..n);
                if x != y {
                    break (x, y);
                }
            })
            .collect()
    }
}

struct Checker<'a> {
    o: &'a Oracle,
    snap: &'a ExactSnapshot,
    r: ViolationReport,
}

const FLOAT_TOL: f64 = 1e-9;

impl<'a> Checker<'a> {
    fn hit(&mut self) {
        self.r.checks += 1;
    }

    fn flag(&mut self, line: String) {
        self.r.violations.push(line);
    }

    /// Accuracy finding: hard when the audit passed, warning otherwise.
    fn flag_stretch(&mut self, line: String) {
        if self.r.audit_passed {
            self.r.violations.push(line);
        } else {
            self.r.warnings.push(line);
        }
    }

    /// True distance to the landmark capped at the landmark-tree depth.
    fn capped_to_landmark(&self, q: NodeId, v: NodeId) -> Dist {
        let d = self.snap.dist(q, v);
        if d <= self.o.params().exact_depth() {
            d
        } else {
            INF
        }
    }

    fn graph_state(&mut self) {
        self.hit();
        if !self.o.graph().self_check() {
            self.flag("graph-adjacency inconsistent adjacency or edge count".into());
        }
    }

    fn sample_structure(&mut self) {
        let sets = self.o.sets();
        let relay = self.o.relay();
        let forest = self.o.forest();

        self.hit();
        if relay.q_list() != sets.q_list() {
            self.flag(format!(
                "sample-structure landmark lists diverge expected {:?} got {:?}",
                relay.q_list(),
                sets.q_list()
            ));
        }
        for (slot, &q) in sets.q_list().iter().enumerate() {
            self.hit();
            if slot < relay.q_list().len() && relay.landmark_tree(slot).source() != q {
                self.flag(format!(
                    "sample-structure slot {} expected source {} got {}",
                    slot,
                    q,
                    relay.landmark_tree(slot).source()
                ));
            }
        }
        self.hit();
        if forest.i_max() != sets.i_max() || self.o.pivots().i_max() != sets.i_max() {
            self.flag(format!(
                "sample-structure scale count expected {} got forest {} pivots {}",
                sets.i_max(),
                forest.i_max(),
                self.o.pivots().i_max()
            ));
        }
        for i in 1..=sets.i_max() {
            for &s in sets.s_level(i) {
                self.hit();
                if forest.tree(i, s).is_none() {
                    self.flag(format!(
                        "sample-structure i={} source {} expected a tree got none",
                        i, s
                    ));
                }
            }
        }
    }

    fn landmark_trees(&mut self) {
        let relay = self.o.relay();
        for (slot, &q) in relay.q_list().iter().enumerate() {
            self.hit();
            if !relay.landmark_tree(slot).structure_ok(self.o.graph()) {
                self.flag(format!("landmark-structure q={} inconsistent tree", q));
            }
            for v in 0..self.snap.n() {
                self.hit();
                let want = self.capped_to_landmark(q, v);
                let got = relay.landmark_level(slot, v);
                if got != want {
                    self.flag(format!(
                        "landmark-level q={} v={} expected {} got {}",
                        q,
                        v,
                        dist_str(want),
                        dist_str(got)
                    ));
                }
            }
        }
    }

    fn provider_estimates(&mut self) {
        let relay = self.o.relay();
        for (slot, &q) in relay.q_list().iter().enumerate() {
            for v in 0..self.snap.n() {
                self.hit();
                let want = self.snap.dist(q, v);
                let got = relay.estimate(slot, v);
                if got != want {
                    self.flag(format!(
                        "provider-estimate q={} v={} expected {} got {}",
                        q,
                        v,
                        dist_str(want),
                        dist_str(got)
                    ));
                }
            }
        }
    }

    fn landmark_distances(&mut self) {
        let relay = self.o.relay();
        for v in 0..self.snap.n() {
            self.hit();
            let want = relay
                .q_list()
                .iter()
                .map(|&q| self.capped_to_landmark(q, v))
                .min()
                .unwrap_or(INF);
            let got = relay.dist_to_q(v);
            if got != want {
                self.flag(format!(
                    "landmark-distance v={} expected {} got {}",
                    v,
                    dist_str(want),
                    dist_str(got)
                ));
            }
        }
    }

    fn short_family(&mut self, pairs: &[(NodeId, NodeId)]) {
        let relay = self.o.relay();
        let cap = self.o.params().short_keep_max();
        for &(x, y) in pairs {
            for (slot, &q) in relay.q_list().iter().enumerate() {
                self.hit();
                let sum = dist_add(self.capped_to_landmark(q, x), self.capped_to_landmark(q, y));
                let want = if sum <= cap { Some(sum) } else { None };
                let got = relay.short_value(x, y, slot);
                if got != want {
                    self.flag(format!(
                        "short-family x={} y={} q={} expected {:?} got {:?}",
                        x, y, q, want, got
                    ));
                }
            }
        }
    }

    fn lazy_family(&mut self, pairs: &[(NodeId, NodeId)]) {
        let relay = self.o.relay();
        let one_plus = self.o.params().one_plus_eps();
        // Per-side refresh discipline: the provider estimate never exceeds
        // its staleness allowance over the last refreshed value.
        for v in 0..self.snap.n() {
            for slot in 0..relay.q_list().len() {
                self.hit();
                let est = relay.estimate(slot, v);
                let last = relay.last_refreshed_estimate(v, slot);
                let fresh = est == last;
                let within = est < INF
                    && last < INF
                    && last <= est
                    && (est as f64) < one_plus * (last as f64) + FLOAT_TOL;
                if !(fresh || within) {
                    self.flag(format!(
                        "lazy-refresh v={} q={} expected estimate within (1+eps) of {} got {}",
                        v,
                        relay.q_list()[slot],
                        dist_str(last),
                        dist_str(est)
                    ));
                }
            }
        }
        // Stored round trips: present exactly while currently finite, never
        // above the live sum, never below it by more than the allowance.
        for &(x, y) in pairs {
            let stored: std::collections::BTreeMap<usize, Dist> =
                relay.lazy_entries(x, y).into_iter().collect();
            for (slot, &q) in relay.q_list().iter().enumerate() {
                self.hit();
                let cur = dist_add(relay.estimate(slot, x), relay.estimate(slot, y));
                match stored.get(&slot) {
                    None => {
                        if cur < INF {
                            self.flag(format!(
                                "lazy-family x={} y={} q={} expected an entry for live sum {} got none",
                                x, y, q, cur
                            ));
                        }
                    }
                    Some(&val) => {
                        let fresh = val == cur;
                        let within = cur < INF
                            && val <= cur
                            && (cur as f64) < one_plus * (val as f64) + FLOAT_TOL;
                        if !(fresh || within) {
                            self.flag(format!(
                                "lazy-family x={} y={} q={} expected within (1+eps) of live sum {} got {}",
                                x,
                                y,
                                q,
                                dist_str(cur),
                                dist_str(val)
                            ));
                        }
                    }
                }
            }
        }
    }

    fn scale_family(&mut self) {
        let relay = self.o.relay();
        self.hit();
        if relay.counters().blocked_reinserts != 0 {
            self.flag(format!(
                "scale-family expected no blocked reinserts got {}",
                relay.counters().blocked_reinserts
            ));
        }
        for i in 1..=relay.i_max() {
            let cap = self.o.params().star_keep_max(i);
            for &s in self.o.sets().s_level(i) {
                self.hit();
                if relay.scale_entries(0, s, i).is_none() {
                    self.flag(format!(
                        "scale-family i={} s={} expected a heap family got none",
                        i, s
                    ));
                    continue;
                }
                for x in 0..self.snap.n() {
                    let stored: std::collections::BTreeMap<usize, Dist> = relay
                        .scale_entries(x, s, i)
                        .expect("checked above")
                        .into_iter()
                        .collect();
                    for (slot, &q) in relay.q_list().iter().enumerate() {
                        self.hit();
                        let sum = dist_add(relay.estimate(slot, x), relay.estimate(slot, s));
                        let want = if sum <= cap { Some(sum) } else { None };
                        let got = stored.get(&slot).copied();
                        if got != want {
                            self.flag(format!(
                                "scale-family i={} s={} x={} q={} expected {:?} got {:?}",
                                i, s, x, q, want, got
                            ));
                        }
                    }
                }
            }
        }
    }

    fn cover_balls(&mut self) {
        let balls = self.o.forest().balls();
        let beta = balls.beta();
        for v in 0..self.snap.n() {
            self.hit();
            let far = self
                .o
                .relay()
                .q_list()
                .iter()
                .map(|&q| self.snap.dist(v, q))
                .min()
                .unwrap_or(INF)
                > beta;
            if balls.is_active(v) != far {
                self.flag(format!(
                    "ball-activation v={} expected {} got {}",
                    v,
                    far,
                    balls.is_active(v)
                ));
            }
            if let Some(ball) = balls.ball(v) {
                for (w, &l) in ball.levels().iter().enumerate() {
                    self.hit();
                    let d = self.snap.dist(v, w);
                    let want = if d <= beta { d } else { INF };
                    if l != want {
                        self.flag(format!(
                            "ball-level center={} v={} expected {} got {}",
                            v,
                            w,
                            dist_str(want),
                            dist_str(l)
                        ));
                    }
                }
            }
        }
    }

    fn scale_trees(&mut self) {
        let forest = self.o.forest();
        for i in 1..=forest.i_max() {
            for t in forest.trees_at(i) {
                self.hit();
                if !t.structure_ok(self.o.graph()) {
                    self.flag(format!(
                        "tree-structure i={} s={} inconsistent tree",
                        i,
                        t.source()
                    ));
                }
                for v in 0..self.snap.n() {
                    if !t.in_tree(v) {
                        continue;
                    }
                    self.hit();
                    let want = self.snap.dist(t.source(), v);
                    let got = t.level(v);
                    if got != want {
                        self.flag(format!(
                            "tree-level i={} s={} v={} expected {} got {}",
                            i,
                            t.source(),
                            v,
                            dist_str(want),
                            dist_str(got)
                        ));
                    }
                }
            }
        }
    }

    /// Every node left out of a scale tree despite being within its depth
    /// must be nearly covered by the relay families.
    fn uncovered_nodes(&mut self) {
        let relay = self.o.relay();
        let forest = self.o.forest();
        let one_plus = self.o.params().one_plus_eps();
        for i in 1..=forest.i_max() {
            let reach = 1usize << i;
            for t in forest.trees_at(i) {
                let s = t.source();
                for v in 0..self.snap.n() {
                    let d = self.snap.dist(v, s);
                    if t.in_tree(v) || d > reach {
                        continue;
                    }
                    self.hit();
                    let cover = relay.scale_min(v, s, i).min(relay.short_min(v, s));
                    let bound = one_plus * one_plus * ((d + 2) as f64);
                    if cover >= INF || (cover as f64) > bound + FLOAT_TOL {
                        self.flag_stretch(format!(
                            "uncovered-node i={} s={} v={} expected cover <= {:.3} got {}",
                            i,
                            s,
                            v,
                            bound,
                            dist_str(cover)
                        ));
                    }
                }
            }
        }
    }

    fn pivot_table(&mut self) {
        let forest = self.o.forest();
        let pivots = self.o.pivots();
        for i in 1..=forest.i_max() {
            for v in 0..self.snap.n() {
                self.hit();
                let mut want: Vec<(Dist, NodeId)> = forest
                    .trees_at(i)
                    .iter()
                    .filter(|t| t.in_tree(v))
                    .map(|t| (t.level(v), t.source()))
                    .collect();
                want.sort_unstable();
                let got = pivots.covering(v, i);
                if got != want {
                    self.flag(format!(
                        "pivot-cover i={} v={} expected {:?} got {:?}",
                        i, v, want, got
                    ));
                }
            }
        }
    }

    /// The landmark round-trip estimate brackets the true distance from
    /// above and stays within the allowance of the best heavy detour.
    fn relay_sandwich(&mut self, pairs: &[(NodeId, NodeId)]) {
        let relay = self.o.relay();
        let one_plus = self.o.params().one_plus_eps();
        for &(x, y) in pairs {
            self.hit();
            let tilde = relay.relay_estimate(x, y);
            let d = self.snap.dist(x, y);
            if tilde < d {
                self.flag(format!(
                    "relay-soundness x={} y={} expected >= {} got {}",
                    x,
                    y,
                    dist_str(d),
                    dist_str(tilde)
                ));
            }
            let heavy = self.snap.heavy_dist(x, y);
            if heavy < INF {
                self.hit();
                let bound = one_plus * one_plus * ((heavy + 2) as f64);
                if tilde >= INF || (tilde as f64) > bound + FLOAT_TOL {
                    self.flag_stretch(format!(
                        "relay-stretch x={} y={} expected <= {:.3} got {}",
                        x,
                        y,
                        bound,
                        dist_str(tilde)
                    ));
                }
            }
        }
    }

    fn queries(&mut self, pairs: &[(NodeId, NodeId)]) {
        let one_plus = self.o.params().one_plus_eps();
        let stretch = one_plus.powi(5);
        for &(x, y) in pairs {
            self.hit();
            let est = self.o.query(x, y).estimate;
            let d = self.snap.dist(x, y);
            if est < d {
                self.flag(format!(
                    "query-soundness x={} y={} expected >= {} got {}",
                    x,
                    y,
                    dist_str(d),
                    dist_str(est)
                ));
            }
            if d < INF {
                self.hit();
                let bound = stretch * ((d + 2) as f64);
                if est >= INF || (est as f64) > bound + FLOAT_TOL {
                    self.flag_stretch(format!(
                        "query-stretch x={} y={} expected <= {:.3} got {}",
                        x,
                        y,
                        bound,
                        dist_str(est)
                    ));
                }
            }
        }
    }
}

/// Sweeps every maintained structure against the snapshot: exact levels
/// and estimates, heap-family contents, ball activation, tree membership
/// (both inclusion and exclusion), pivot consistency, and query soundness
/// plus conditional stretch on a pair sample (all pairs up to n = 128,
/// 1000 seeded pairs beyond).
pub fn check_all(o: &Oracle, snap: &ExactSnapshot) -> Result<ViolationReport, VersionMismatch> {
    if snap.version() != o.graph().version() {
        return Err(VersionMismatch {
            snapshot: snap.version(),
            oracle: o.graph().version(),
        });
    }
    let audit = sampling::audit(o.sets(), o.graph(), snap, o.params().beta);
    let mut c = Checker {
        o,
        snap,
        r: ViolationReport {
            version: snap.version(),
            checks: 0,
            audit_passed: audit.passes(),
            audit_violations: audit.violations.len(),
            violations: Vec::new(),
            warnings: Vec::new(),
        },
    };
    let pairs = pair_domain(snap.n());
    let qpairs = query_domain(snap.n());
    c.graph_state();
    c.sample_structure();
    c.landmark_trees();
    c.provider_estimates();
    c.landmark_distances();
    c.short_family(&pairs);
    c.lazy_family(&pairs);
    c.scale_family();
    c.cover_balls();
    c.scale_trees();
    c.uncovered_nodes();
    c.pivot_table();
    c.relay_sandwich(&pairs);
    c.queries(&qpairs);
    Ok(c.r)
}
