//! Seeded node samples drawn once at construction and never redrawn.
//!
//! Q hits dense neighbourhoods (per-node probability ~ c ln n / sqrt(n));
//! the scale sets S_1..S_imax hit distance ranges (probability for S_i is
//! ~ c ln n / (epsilon 2^i)). All guarantees that downstream structures
//! lean on are probabilistic, so an audit reports, per graph version, the
//! concrete hitting failures; checkers then demote the affected stretch
//! assertions to warnings instead of failing hard.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{DynamicGraph, NodeId};
use crate::provider::ConfigError;
use crate::verify::ExactSnapshot;

/// Number of scale levels for n nodes: ceil(log2 n), at least 1.
pub fn level_count(n: usize) -> u32 {
    if n <= 2 {
        1
    } else {
        (n as f64).log2().ceil() as u32
    }
}

/// The frozen sample sets. Deletion-oblivious: drawn from (n, epsilon, c,
/// seed) alone, before any deletion happens.
#[derive(Debug, Clone)]
pub struct SampleSets {
    n: usize,
    epsilon: f64,
    c: f64,
    seed: u64,
    q: Vec<NodeId>,
    q_slot: Vec<Option<u32>>,
    s: Vec<Vec<NodeId>>,
    in_s: Vec<Vec<bool>>,
}

impl SampleSets {
    pub fn draw(n: usize, epsilon: f64, c: f64, seed: u64) -> Result<Self, ConfigError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(ConfigError::Epsilon(epsilon));
        }
        if c <= 0.0 {
            return Err(ConfigError::SamplingConstant(c));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ln_n = (n.max(1) as f64).ln();
        let p_q = (c * ln_n / (n as f64).sqrt()).min(1.0);
        let mut q = Vec::new();
        let mut q_slot = vec![None; n];
        for v in 0..n {
            if rng.gen::<f64>() < p_q {
                q_slot[v] = Some(q.len() as u32);
                q.push(v);
            }
        }
        let levels = level_count(n);
        let mut s = Vec::with_capacity(levels as usize);
        let mut in_s = Vec::with_capacity(levels as usize);
        for i in 1..=levels {
            let p_i = (c * ln_n / (epsilon * (1u64 << i) as f64)).min(1.0);
            let mut si = Vec::new();
            let mut mask = vec![false; n];
            for v in 0..n {
                if rng.gen::<f64>() < p_i {
                    si.push(v);
                    mask[v] = true;
                }
            }
            s.push(si);
            in_s.push(mask);
        }
        Ok(SampleSets {
            n,
            epsilon,
            c,
            seed,
            q,
            q_slot,
            s,
            in_s,
        })
    }

    /// Builds explicit sets instead of drawing them — deterministic
    /// fixtures for tests and reproductions. `q` must be ascending and
    /// duplicate-free; `s` holds one ascending list per scale starting at
    /// i = 1. Panics on an out-of-range node.
    pub fn from_parts(
        n: usize,
        epsilon: f64,
        q: Vec<NodeId>,
        s: Vec<Vec<NodeId>>,
    ) -> Self {
        assert!(
            q.iter().all(|&v| v < n) && s.iter().flatten().all(|&v| v < n),
            "sample node out of range"
        );
        let mut q_slot = vec![None; n];
        for (slot, &v) in q.iter().enumerate() {
            q_slot[v] = Some(slot as u32);
        }
        let in_s = s
            .iter()
            .map(|list| {
                let mut mask = vec![false; n];
                for &v in list {
                    mask[v] = true;
                }
                mask
            })
            .collect();
        SampleSets {
            n,
            epsilon,
            c: 0.0,
            seed: 0,
            q,
            q_slot,
            s,
            in_s,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The dense-neighbourhood sample, ascending.
    pub fn q_list(&self) -> &[NodeId] {
        &self.q
    }

    /// Slot of v within the Q ordering, if sampled.
    pub fn q_slot(&self, v: NodeId) -> Option<usize> {
        self.q_slot[v].map(|s| s as usize)
    }

    pub fn in_q(&self, v: NodeId) -> bool {
        self.q_slot[v].is_some()
    }

    /// Highest scale index (levels run 1..=i_max).
    pub fn i_max(&self) -> u32 {
        self.s.len() as u32
    }

    /// Members of S_i, ascending. `i` is 1-based.
    pub fn s_level(&self, i: u32) -> &[NodeId] {
        &self.s[(i - 1) as usize]
    }

    pub fn in_s(&self, i: u32, v: NodeId) -> bool {
        self.in_s[(i - 1) as usize][v]
    }

    pub(crate) fn corrupt_insert_q(&mut self, v: NodeId) {
        if self.q_slot[v].is_none() {
            let pos = self.q.binary_search(&v).unwrap_err();
            self.q.insert(pos, v);
            for (idx, &node) in self.q.iter().enumerate() {
                self.q_slot[node] = Some(idx as u32);
            }
        }
    }

    #[cfg(test)]
    pub(crate) fn corrupt_insert_s(&mut self, i: u32, v: NodeId) {
        let idx = (i - 1) as usize;
        if !self.in_s[idx][v] {
            let pos = self.s[idx].binary_search(&v).unwrap_err();
            self.s[idx].insert(pos, v);
            self.in_s[idx][v] = true;
        }
    }
}

/// One concrete hitting failure at one graph version.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditViolation {
    /// v is heavy but no neighbour of v is in Q.
    HeavyUnhit { v: NodeId },
    /// Some node sits at finite distance >= epsilon*2^i from v, yet S_i
    /// misses the radius-epsilon*2^i ball around v.
    ScaleBallUnhit { v: NodeId, i: u32 },
    /// The beta-ball around v holds >= sqrt(n) nodes, yet contains no Q node.
    BetaBallUnhit { v: NodeId },
}

#[derive(Debug, Clone)]
pub struct AuditReport {
    pub version: u64,
    pub violations: Vec<AuditViolation>,
}

impl AuditReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the three hitting properties against exact distances. `beta`
/// comes from the provider parameters.
pub fn audit(
    sets: &SampleSets,
    g: &DynamicGraph,
    snap: &ExactSnapshot,
    beta: usize,
) -> AuditReport {
    let n = g.n();
    let mut violations = Vec::new();
    // (1) heavy nodes must see Q in their neighbourhood.
    for v in 0..n {
        if g.is_heavy(v) && !g.neighbors(v).any(|u| sets.in_q(u)) {
            violations.push(AuditViolation::HeavyUnhit { v });
        }
    }
    // (2) scale balls: only required when someone is reachably far.
    for v in 0..n {
        let ecc = snap.eccentricity(v) as f64;
        for i in 1..=sets.i_max() {
            let radius = sets.epsilon() * (1u64 << i) as f64;
            if ecc < radius {
                continue;
            }
            let hit = sets
                .s_level(i)
                .iter()
                .any(|&s| (snap.dist(v, s) as f64) <= radius);
            if !hit {
                violations.push(AuditViolation::ScaleBallUnhit { v, i });
            }
        }
    }
    // (3) populous beta-balls must contain a Q node.
    let sqrt_n = (n as f64).sqrt();
    for v in 0..n {
        let row = snap.row(v);
        let ball = row.iter().filter(|&&d| d <= beta).count();
        if (ball as f64) >= sqrt_n && !sets.q_list().iter().any(|&q| row[q] <= beta) {
            violations.push(AuditViolation::BetaBallUnhit { v });
        }
    }
    AuditReport {
        version: g.version(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;

    #[test]
    fn draw_is_deterministic_and_seed_sensitive() {
        let a = SampleSets::draw(64, 0.5, 4.0, 9).unwrap();
        let b = SampleSets::draw(64, 0.5, 4.0, 9).unwrap();
        assert_eq!(a.q_list(), b.q_list());
        for i in 1..=a.i_max() {
            assert_eq!(a.s_level(i), b.s_level(i));
        }
        let c = SampleSets::draw(64, 0.5, 4.0, 10).unwrap();
        let differs = a.q_list() != c.q_list()
            || (1..=a.i_max()).any(|i| a.s_level(i) != c.s_level(i));
        assert!(differs);
    }

    #[test]
    fn clamped_probability_samples_everyone() {
        // c ln n / (eps * 2) >= 1 for n=64, eps=0.5, c=4: S_1 = V.
        let s = SampleSets::draw(64, 0.5, 4.0, 3).unwrap();
        assert_eq!(s.s_level(1).len(), 64);
        // And Q too: 4 * ln 64 / 8 = 2.08 >= 1.
        assert_eq!(s.q_list().len(), 64);
    }

    #[test]
    fn level_counts() {
        assert_eq!(level_count(2), 1);
        assert_eq!(level_count(8), 3);
        assert_eq!(level_count(9), 4);
        assert_eq!(level_count(64), 6);
        assert_eq!(level_count(96), 7);
    }

    #[test]
    fn q_slots_are_dense_and_sorted() {
        let s = SampleSets::draw(96, 0.5, 1.0, 17).unwrap();
        let q = s.q_list();
        assert!(q.windows(2).all(|w| w[0] < w[1]));
        for (slot, &v) in q.iter().enumerate() {
            assert_eq!(s.q_slot(v), Some(slot));
        }
        let sampled: Vec<bool> = (0..96).map(|v| s.in_q(v)).collect();
        assert_eq!(sampled.iter().filter(|&&b| b).count(), q.len());
    }

    #[test]
    fn audit_clean_when_everything_sampled() {
        let g = generators::two_block();
        let snap = ExactSnapshot::take(&g);
        // c huge: every probability clamps to 1, all sets = V, nothing can
        // be missed.
        let sets = SampleSets::draw(16, 0.5, 50.0, 1).unwrap();
        let report = audit(&sets, &g, &snap, 4);
        assert!(report.passes());
    }

    #[test]
    fn audit_flags_unhit_heavy_node() {
        let g = generators::two_block();
        let snap = ExactSnapshot::take(&g);
        // Hand-built sets: Q empty, so every heavy node is a violation.
        let mut sets = SampleSets::draw(16, 0.5, 1e-9, 1).unwrap();
        assert!(sets.q_list().is_empty());
        // Re-add a single far-away Q node so property (1) still fails for
        // block nodes: node 13 is a bridge node, adjacent to 12 and 14 only.
        sets.corrupt_insert_q(13);
        let report = audit(&sets, &g, &snap, 4);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, AuditViolation::HeavyUnhit { v: 0 })));
        // Scale balls unhit as well (S_i all empty, graph has spread).
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, AuditViolation::ScaleBallUnhit { .. })));
    }

    #[test]
    fn audit_beta_ball_property() {
        let g = generators::two_block();
        let snap = ExactSnapshot::take(&g);
        let mut sets = SampleSets::draw(16, 0.5, 1e-9, 1).unwrap();
        sets.corrupt_insert_q(13);
        // beta = 1: B(0, 1) = 6 nodes >= 4 = sqrt(16), and 13 is farther
        // than 1 from node 0.
        let report = audit(&sets, &g, &snap, 1);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, AuditViolation::BetaBallUnhit { v: 0 })));
        // Node 13's own ball B(13,1) = {12,13,14} = 3 < 4: no requirement.
        assert!(!report
            .violations
            .iter()
            .any(|v| matches!(v, AuditViolation::BetaBallUnhit { v: 13 })));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SampleSets::draw(8, 0.5, 0.0, 1).is_err());
        assert!(SampleSets::draw(8, 1.5, 2.0, 1).is_err());
    }
}
