//! Distance-provider contract and its exact reference implementation.
//!
//! A provider maintains, per tracked source q, estimates of the distance
//! from q to every node under edge deletions. The heap layers consume the
//! estimates through this contract only, so approximate providers can be
//! swapped in as long as they respect the envelope below.

use thiserror::Error;

use crate::dist::{strict_below, Dist, INF};
use crate::estree::EsTree;
use crate::graph::{DynamicGraph, NodeId};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("epsilon must lie strictly between 0 and 1, got {0}")]
    Epsilon(f64),
    #[error("zeta must lie in [1, n] = [1, {n}], got {zeta}")]
    Zeta { zeta: usize, n: usize },
    #[error("sampling constant c must be positive, got {0}")]
    SamplingConstant(f64),
}

/// Accuracy knobs shared by every distance-dependent structure.
///
/// beta = ceil((2/epsilon) * zeta); the short-range cutoff is 8*beta/epsilon.
/// Estimates must satisfy, against true distance D:
///   estimate >= D,
///   estimate <= (1 + epsilon/2) * D + zeta, and
///   estimate <= (1 + epsilon) * D whenever D >= beta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProviderParams {
    pub epsilon: f64,
    pub zeta: usize,
    pub beta: usize,
}

impl ProviderParams {
    /// Default zeta: n^(sqrt(6/epsilon)/sqrt(log2 n)), capped at n.
    /// At the scales this library targets the cap is what binds.
    pub fn default_zeta(n: usize, epsilon: f64) -> usize {
        if n <= 1 {
            return 1;
        }
        let exponent = (6.0 / epsilon).sqrt() / (n as f64).log2().sqrt();
        let z = (n as f64).powf(exponent);
        if z >= n as f64 {
            n
        } else {
            (z.ceil() as usize).clamp(1, n)
        }
    }

    pub fn new(n: usize, epsilon: f64, zeta_override: Option<usize>) -> Result<Self, ConfigError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(ConfigError::Epsilon(epsilon));
        }
        let zeta = zeta_override.unwrap_or_else(|| Self::default_zeta(n, epsilon));
        if zeta < 1 || zeta > n.max(1) {
            return Err(ConfigError::Zeta { zeta, n });
        }
        let beta = ((2.0 / epsilon) * zeta as f64).ceil() as usize;
        Ok(ProviderParams {
            epsilon,
            zeta,
            beta,
        })
    }

    pub fn one_plus_eps(&self) -> f64 {
        1.0 + self.epsilon
    }

    /// The short-range horizon 8*beta/epsilon as a real.
    pub fn short_range(&self) -> f64 {
        8.0 * self.beta as f64 / self.epsilon
    }

    /// Depth bound for the exact per-q trees: ceil(8*beta/epsilon).
    pub fn exact_depth(&self) -> Dist {
        self.short_range().ceil() as Dist
    }

    /// Largest integer value a short-range heap entry may hold
    /// (entries must stay strictly below 8*beta/epsilon).
    pub fn short_keep_max(&self) -> Dist {
        strict_below(self.short_range())
    }

    /// Largest integer value a scale-i star heap entry may hold
    /// (entries must stay at most (1+epsilon) * 2^i).
    pub fn star_keep_max(&self, i: u32) -> Dist {
        (self.one_plus_eps() * (1u64 << i) as f64).floor() as Dist
    }
}

/// Estimate increase notification: `node`'s estimate from this provider's
/// source rose to `new_estimate`. One event per node per deletion, already
/// coalesced. Decreases never generate events.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BrIncrease {
    pub node: NodeId,
    pub new_estimate: Dist,
}

/// Per-source decremental distance estimates. Implementations must keep
/// `estimate` sound (never below the true distance) at every version.
pub trait DistanceProvider {
    fn source(&self) -> NodeId;
    fn estimate(&self, v: NodeId) -> Dist;
    /// Called once per deletion, after the graph itself was updated.
    fn on_delete(&mut self, g: &DynamicGraph, u: NodeId, v: NodeId) -> Vec<BrIncrease>;
}

/// Reference provider: a full-depth decremental BFS tree, so estimates are
/// exact and monotonically non-decreasing.
#[derive(Debug, Clone)]
pub struct ExactProvider {
    tree: EsTree,
}

impl ExactProvider {
    pub fn build(g: &DynamicGraph, source: NodeId) -> Self {
        ExactProvider {
            tree: EsTree::build(g, source, g.n()),
        }
    }

    pub fn edge_touches(&self) -> u64 {
        self.tree.edge_touches()
    }

    pub(crate) fn corrupt_estimate(&mut self, v: NodeId, value: Dist) {
        self.tree.corrupt_level(v, value);
    }
}

impl DistanceProvider for ExactProvider {
    fn source(&self) -> NodeId {
        self.tree.source()
    }

    fn estimate(&self, v: NodeId) -> Dist {
        self.tree.level(v)
    }

    fn on_delete(&mut self, g: &DynamicGraph, u: NodeId, v: NodeId) -> Vec<BrIncrease> {
        self.tree
            .on_delete(g, u, v)
            .into_iter()
            .map(|c| BrIncrease {
                node: c.node,
                new_estimate: c.new,
            })
            .collect()
    }
}

/// Checks one provider state against brute-force distances: soundness plus
/// the approximation envelope. Returns offending nodes.
pub fn contract_violations(
    p: &dyn DistanceProvider,
    params: &ProviderParams,
    exact_from_source: &[Dist],
) -> Vec<NodeId> {
    let mut bad = Vec::new();
    for (v, &d) in exact_from_source.iter().enumerate() {
        let est = p.estimate(v);
        if est < d {
            bad.push(v);
            continue;
        }
        if d == INF {
            continue;
        }
        let d_f = d as f64;
        if est != INF && est as f64 > (1.0 + params.epsilon / 2.0) * d_f + params.zeta as f64 {
            bad.push(v);
            continue;
        }
        if d >= params.beta && (est == INF || est as f64 > params.one_plus_eps() * d_f) {
            bad.push(v);
        }
    }
    bad
}
