//! The assembled distance oracle: graph, samples, relay layer, scale
//! trees, and pivots advanced in lock-step under edge deletions, plus the
//! two-term query.
//!
//! A query for (u, v) takes the better of two upper bounds:
//!
//! * **pivot term** — at the smallest scale i where u has a pivot p whose
//!   tree also contains v, the sum of the two tree levels (both are true
//!   distances while the trees are sound);
//! * **relay term** — the best landmark round trip: the exact short-family
//!   sum where one is stored, else the lazily-refreshed sum scaled by
//!   (1 + eps) to absorb its staleness allowance.
//!
//! Both terms are true upper bounds at all times, so the estimate is sound
//! unconditionally; the sampling properties make one of them tight.

use thiserror::Error;

use crate::dist::{Dist, INF};
use crate::graph::{DynamicGraph, GraphError, NodeId};
use crate::light::{LightCounters, LightForest, StaleCover};
use crate::pivots::{Pivot, PivotTable};
use crate::provider::{ConfigError, ProviderParams};
use crate::relay::{RelayCounters, RelayHeaps};
use crate::sampling::SampleSets;

/// Tuning for a freshly built oracle.
#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    /// Accuracy knob in (0, 1); smaller is tighter and costlier.
    pub epsilon: f64,
    /// Sampling-rate multiplier (landmarks and scale sources).
    pub c: f64,
    /// Seed for the sample draw.
    pub seed: u64,
    /// Overrides the derived landmark-tree budget parameter; mainly for
    /// tests and small instances where the derived value saturates.
    pub zeta_override: Option<usize>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            epsilon: 0.5,
            c: 1.0,
            seed: 0,
            zeta_override: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Cover(#[from] StaleCover),
}

#[derive(Debug, Error)]
pub enum UpdateError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cover(#[from] StaleCover),
}

/// What produced the returned estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    /// The endpoints are the same node.
    Identical,
    /// Both endpoints sit in the scale-`scale` tree rooted at `pivot`.
    PivotTree { scale: u32, pivot: NodeId },
    /// The round trip through `landmark` won.
    LandmarkRelay { landmark: NodeId },
    /// No term was finite.
    Unreachable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryAnswer {
    pub estimate: Dist,
    pub witness: Witness,
}

/// Per-deletion accounting, returned by [`Oracle::delete`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UpdateStats {
    /// Graph version after this deletion.
    pub version: u64,
    /// Landmark-tree level raises.
    pub exact_level_rises: usize,
    /// Provider estimate raises.
    pub estimate_rises: usize,
    /// Nodes whose distance to the landmark set rose.
    pub landmark_distance_rises: usize,
    /// Pair-family minimum raises.
    pub pair_min_rises: usize,
    /// Scale-family minimum raises.
    pub scale_min_rises: usize,
    /// Scale-tree membership events (adds, level changes, removals).
    pub membership_events: usize,
    /// Cover balls activated by this deletion.
    pub ball_activations: u64,
}

/// The decremental (1 + eps, 2)-style distance oracle.
#[derive(Debug)]
pub struct Oracle {
    g: DynamicGraph,
    params: ProviderParams,
    sets: SampleSets,
    relay: RelayHeaps,
    forest: LightForest,
    pivots: PivotTable,
}

impl Oracle {
    /// Draws the sample sets from `cfg` and builds every layer.
    pub fn build(g: DynamicGraph, cfg: &OracleConfig) -> Result<Self, BuildError> {
        let sets = SampleSets::draw(g.n(), cfg.epsilon, cfg.c, cfg.seed)?;
        Self::with_sets(g, sets, cfg.zeta_override)
    }

    /// Builds on explicit sample sets (fixtures, reproductions).
    pub fn with_sets(
        g: DynamicGraph,
        sets: SampleSets,
        zeta_override: Option<usize>,
    ) -> Result<Self, BuildError> {
        assert_eq!(g.n(), sets.n(), "sample sets sized for a different graph");
        let params = ProviderParams::new(g.n(), sets.epsilon(), zeta_override)?;
        let relay = RelayHeaps::build(&g, &params, &sets);
        let (forest, events) = LightForest::build(&g, &relay, &sets)?;
        let mut pivots = PivotTable::new(g.n(), sets.i_max());
        pivots.apply(&events);
        Ok(Oracle {
            g,
            params,
            sets,
            relay,
            forest,
            pivots,
        })
    }

    /// Deletes one edge and advances every layer past it.
    pub fn delete(&mut self, u: NodeId, v: NodeId) -> Result<UpdateStats, UpdateError> {
        self.g.delete_edge(u, v)?;
        let activations_before = self.forest.balls().activations();
        let outcome = self.relay.apply_deletion(&self.g, u, v);
        let events = self
            .forest
            .apply_deletion(&self.g, u, v, &self.relay, &outcome, &self.sets)?;
        self.pivots.apply(&events);
        Ok(UpdateStats {
            version: self.g.version(),
            exact_level_rises: outcome.exact_rises.len(),
            estimate_rises: outcome.estimate_rises.len(),
            landmark_distance_rises: outcome.dist_to_q_changes.len(),
            pair_min_rises: outcome.pair_min_rises.len(),
            scale_min_rises: outcome.scale_min_rises.len(),
            membership_events: events.len(),
            ball_activations: self.forest.balls().activations() - activations_before,
        })
    }

    /// The pivot term: at the smallest scale where `u` has a pivot whose
    /// tree contains `v`, the sum of the two tree levels.
    fn pivot_term(&self, u: NodeId, v: NodeId) -> Option<(Dist, u32, Pivot)> {
        for i in 1..=self.sets.i_max() {
            let Some(p) = self.pivots.pivot(u, i) else {
                continue;
            };
            let tree = self
                .forest
                .tree(i, p.source)
                .expect("pivot names a live tree");
            let lv = tree.level(v);
            if lv < INF {
                return Some((p.level + lv, i, p));
            }
        }
        None
    }

    /// The landmark achieving the relay estimate, for the query witness.
    fn relay_witness(&self, u: NodeId, v: NodeId, value: Dist) -> Option<NodeId> {
        if self.relay.short_min(u, v) == value {
            return self
                .relay
                .short_entries(u, v)
                .into_iter()
                .min_by_key(|&(slot, val)| (val, slot))
                .map(|(slot, _)| self.relay.q_list()[slot]);
        }
        self.relay
            .lazy_entries(u, v)
            .into_iter()
            .min_by_key(|&(slot, val)| (val, slot))
            .map(|(slot, _)| self.relay.q_list()[slot])
    }

    /// Sound upper estimate of dist(u, v), with what produced it.
    pub fn query(&self, u: NodeId, v: NodeId) -> QueryAnswer {
        if u == v {
            return QueryAnswer {
                estimate: 0,
                witness: Witness::Identical,
            };
        }
        let relay_est = self.relay.relay_estimate(u, v);
        let pivot_est = self.pivot_term(u, v);
        let best_pivot = pivot_est.map_or(INF, |(d, _, _)| d);
        let estimate = relay_est.min(best_pivot);
        let witness = if estimate >= INF {
            Witness::Unreachable
        } else if best_pivot <= relay_est {
            let (_, scale, p) = pivot_est.expect("finite pivot term");
            Witness::PivotTree {
                scale,
                pivot: p.source,
            }
        } else {
            Witness::LandmarkRelay {
                landmark: self
                    .relay_witness(u, v, relay_est)
                    .expect("finite relay term has a landmark"),
            }
        };
        QueryAnswer { estimate, witness }
    }

    pub fn graph(&self) -> &DynamicGraph {
        &self.g
    }

    pub fn params(&self) -> &ProviderParams {
        &self.params
    }

    pub fn sets(&self) -> &SampleSets {
        &self.sets
    }

    pub fn relay(&self) -> &RelayHeaps {
        &self.relay
    }

    pub fn forest(&self) -> &LightForest {
        &self.forest
    }

    pub fn pivots(&self) -> &PivotTable {
        &self.pivots
    }

    pub fn relay_counters(&self) -> RelayCounters {
        self.relay.counters()
    }

    pub fn light_counters(&self) -> LightCounters {
        self.forest.counters()
    }

    /// Total structural work performed so far, in touch units.
    pub fn work(&self) -> u64 {
        self.relay.counters().work() + self.forest.counters().work()
    }

    pub(crate) fn parts_mut(
        &mut self,
    ) -> (
        &mut DynamicGraph,
        &mut SampleSets,
        &mut RelayHeaps,
        &mut LightForest,
        &mut PivotTable,
    ) {
        (
            &mut self.g,
            &mut self.sets,
            &mut self.relay,
            &mut self.forest,
            &mut self.pivots,
        )
    }
}

/// One line of an operations script.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Delete(NodeId, NodeId),
    Query(NodeId, NodeId),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OpsParseError {
    #[error("line {line}: expected 'D u v' or 'Q u v', got {got:?}")]
    BadLine { line: usize, got: String },
    #[error("line {line}: bad node id {got:?}")]
    BadNode { line: usize, got: String },
}

/// Parses an operations script: one `D u v` (delete) or `Q u v` (query)
/// per line; blank lines and `#` comments are skipped.
pub fn parse_ops(text: &str) -> Result<Vec<Op>, OpsParseError> {
    let mut ops = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut it = trimmed.split_whitespace();
        let (kind, a, b, rest) = (it.next(), it.next(), it.next(), it.next());
        let (Some(kind), Some(a), Some(b), None) = (kind, a, b, rest) else {
            return Err(OpsParseError::BadLine {
                line,
                got: trimmed.to_string(),
            });
        };
        let parse = |tok: &str| {
            tok.parse::<NodeId>().map_err(|_| OpsParseError::BadNode {
                line,
                got: tok.to_string(),
            })
        };
        let (u, v) = (parse(a)?, parse(b)?);
        match kind {
            "D" => ops.push(Op::Delete(u, v)),
            "Q" => ops.push(Op::Query(u, v)),
            _ => {
                return Err(OpsParseError::BadLine {
                    line,
                    got: trimmed.to_string(),
                })
            }
        }
    }
    Ok(ops)
}
