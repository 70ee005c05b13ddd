//! Single-field corruption hooks for validating the consistency checker.
//!
//! Each fault flips exactly one stored value in one maintained component,
//! leaving everything else untouched — the checker must notice. The
//! injector scans deterministically for the first spot where the fault is
//! expressible on the current state (e.g. a live heap entry, an active
//! ball) and reports what it touched, or `None` when the state offers no
//! such spot.

use crate::dist::{Dist, INF};
use crate::graph::NodeId;
use crate::oracle::Oracle;

/// One corruption per maintained component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Remove one direction of an adjacency entry.
    GraphHalfEdge,
    /// Add a node to the landmark sample that no structure knows about.
    PhantomLandmark,
    /// Lower one finite landmark-tree level.
    LandmarkLevelDrop,
    /// Lower one finite provider estimate.
    ProviderUnderestimate,
    /// Lower one live short-family entry.
    ShortEntryLowered,
    /// Zero one live lazy-family entry.
    LazyEntryZero,
    /// Lower one live scale-family entry.
    ScaleEntryLowered,
    /// Deactivate one active cover ball.
    BallDeactivate,
    /// Raise one non-root scale-tree level.
    TreeLevelShift,
    /// Drop the minimum entry of one pivot cover set.
    PivotDrop,
}

/// Every fault, in a fixed order.
pub const ALL_FAULTS: [Fault; 10] = [
    Fault::GraphHalfEdge,
    Fault::PhantomLandmark,
    Fault::LandmarkLevelDrop,
    Fault::ProviderUnderestimate,
    Fault::ShortEntryLowered,
    Fault::LazyEntryZero,
    Fault::ScaleEntryLowered,
    Fault::BallDeactivate,
    Fault::TreeLevelShift,
    Fault::PivotDrop,
];

/// Injects `fault` at the first expressible spot, returning a description
/// of what was corrupted, or `None` if the current state has no valid
/// target (e.g. no active ball to deactivate).
pub fn inject(o: &mut Oracle, fault: Fault) -> Option<String> {
    let n = o.graph().n();
    match fault {
        Fault::GraphHalfEdge => {
            let (u, v) = o.graph().edges().first().copied()?;
            o.parts_mut().0.corrupt_drop_half_edge(u, v);
            Some(format!("dropped half of edge ({u}, {v})"))
        }
        Fault::PhantomLandmark => {
            let v = (0..n).find(|&v| !o.sets().in_q(v))?;
            o.parts_mut().1.corrupt_insert_q(v);
            Some(format!("inserted phantom landmark {v}"))
        }
        Fault::LandmarkLevelDrop => {
            let relay = o.relay();
            let (slot, v, lvl) = (0..relay.q_list().len())
                .flat_map(|slot| (0..n).map(move |v| (slot, v)))
                .find_map(|(slot, v)| {
                    let lvl = relay.landmark_level(slot, v);
                    (lvl >= 1 && lvl < INF).then_some((slot, v, lvl))
                })?;
            o.parts_mut().2.corrupt_landmark_level(slot, v, lvl - 1);
            Some(format!("lowered landmark level of node {v} to {}", lvl - 1))
        }
        Fault::ProviderUnderestimate => {
            let relay = o.relay();
            let (slot, v, est) = (0..relay.q_list().len())
                .flat_map(|slot| (0..n).map(move |v| (slot, v)))
                .find_map(|(slot, v)| {
                    let est = relay.estimate(slot, v);
                    (est >= 1 && est < INF).then_some((slot, v, est))
                })?;
            o.parts_mut().2.corrupt_provider_estimate(slot, v, est - 1);
            Some(format!("lowered provider estimate of node {v} to {}", est - 1))
        }
        Fault::ShortEntryLowered => {
            let (x, y, slot, val) = live_pair(o, |o, x, y| o.relay().short_entries(x, y))?;
            o.parts_mut().2.corrupt_short_value(x, y, slot, val - 1);
            Some(format!("lowered short entry ({x}, {y}) to {}", val - 1))
        }
        Fault::LazyEntryZero => {
            let (x, y, slot, _) = live_pair(o, |o, x, y| o.relay().lazy_entries(x, y))?;
            o.parts_mut().2.corrupt_lazy_value(x, y, slot, 0);
            Some(format!("zeroed lazy entry ({x}, {y})"))
        }
        Fault::ScaleEntryLowered => {
            let relay = o.relay();
            let found = (1..=relay.i_max())
                .flat_map(|i| {
                    relay
                        .scale_sources(i)
                        .iter()
                        .flat_map(move |&s| (0..n).map(move |x| (i, s, x)))
                })
                .find_map(|(i, s, x)| {
                    relay.scale_entries(x, s, i)?.into_iter().find_map(|(slot, val)| {
                        (val >= 1 && val < INF).then_some((i, s, x, slot, val))
                    })
                })?;
            let (i, s, x, slot, val) = found;
            o.parts_mut().2.corrupt_scale_value(x, s, i, slot, val - 1);
            Some(format!("lowered scale-{i} entry ({x}, {s}) to {}", val - 1))
        }
        Fault::BallDeactivate => {
            let v = (0..n).find(|&v| o.forest().balls().is_active(v))?;
            o.parts_mut().3.corrupt_ball_deactivate(v);
            Some(format!("deactivated cover ball of node {v}"))
        }
        Fault::TreeLevelShift => {
            let forest = o.forest();
            let (i, s, v, lvl) = (1..=forest.i_max())
                .flat_map(|i| forest.trees_at(i).iter().map(move |t| (i, t)))
                .find_map(|(i, t)| {
                    (0..n).find_map(|v| {
                        (v != t.source() && t.in_tree(v)).then(|| (i, t.source(), v, t.level(v)))
                    })
                })?;
            o.parts_mut().3.corrupt_tree_level(i, s, v, lvl + 1);
            Some(format!("raised scale-{i} tree level of node {v} to {}", lvl + 1))
        }
        Fault::PivotDrop => {
            let pivots = o.pivots();
            let (v, i) = (1..=pivots.i_max())
                .flat_map(|i| (0..n).map(move |v| (v, i)))
                .find(|&(v, i)| pivots.pivot(v, i).is_some())?;
            o.parts_mut().4.corrupt_drop_min(v, i);
            Some(format!("dropped nearest scale-{i} cover of node {v}"))
        }
    }
}

/// First pair with a live positive finite entry, by the given family view.
fn live_pair(
    o: &Oracle,
    entries: impl Fn(&Oracle, NodeId, NodeId) -> Vec<(usize, Dist)>,
) -> Option<(NodeId, NodeId, usize, Dist)> {
    let n = o.graph().n();
    (0..n)
        .flat_map(|x| (x..n).map(move |y| (x, y)))
        .find_map(|(x, y)| {
            entries(o, x, y)
                .into_iter()
                .find_map(|(slot, val)| (val >= 1 && val < INF).then_some((x, y, slot, val)))
        })
}
