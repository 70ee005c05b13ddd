//! Pivot bookkeeping: for every node v and scale i, the scale-tree source
//! nearest to v among the trees that currently contain v.
//!
//! Scale trees report membership changes as events; this table folds them
//! into one ordered set of (level, source) per (node, scale), so the pivot
//! — the minimum entry, ties to the lowest source id — is O(1) to read and
//! O(log) to maintain. Levels equal true distances while the trees are
//! sound, so the pivot really is the nearest covering source.

use std::collections::BTreeSet;

use crate::dist::Dist;
use crate::graph::NodeId;
use crate::light::{MembershipChange, MembershipEvent};

/// One pivot lookup result: the nearest covering source and its distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pivot {
    pub source: NodeId,
    pub level: Dist,
}

#[derive(Debug)]
pub struct PivotTable {
    i_max: u32,
    /// entries[i-1][v] = ordered (level, source) pairs for trees containing v.
    entries: Vec<Vec<BTreeSet<(Dist, NodeId)>>>,
    applied: u64,
}

impl PivotTable {
    pub fn new(n: usize, i_max: u32) -> Self {
        PivotTable {
            i_max,
            entries: (0..i_max).map(|_| vec![BTreeSet::new(); n]).collect(),
            applied: 0,
        }
    }

    pub fn i_max(&self) -> u32 {
        self.i_max
    }

    pub fn applied(&self) -> u64 {
        self.applied
    }

    /// Folds one batch of membership events in emission order. Each event
    /// must be consistent with the current table (adds are new, removals
    /// and level changes name the stored level); violations panic in debug
    /// builds and are recovered by best effort in release builds.
    pub fn apply(&mut self, events: &[MembershipEvent]) {
        for e in events {
            let set = &mut self.entries[(e.scale - 1) as usize][e.node];
            match e.change {
                MembershipChange::Added { level } => {
                    let fresh = set.insert((level, e.source));
                    debug_assert!(fresh, "duplicate add for {:?}", e);
                }
                MembershipChange::LevelChanged { old, new } => {
                    let had = set.remove(&(old, e.source));
                    debug_assert!(had, "level change without entry for {:?}", e);
                    set.insert((new, e.source));
                }
                MembershipChange::Removed { old } => {
                    let had = set.remove(&(old, e.source));
                    debug_assert!(had, "removal without entry for {:?}", e);
                }
            }
            self.applied += 1;
        }
    }

    /// The nearest covering source at scale i, ties to the lowest id.
    pub fn pivot(&self, v: NodeId, i: u32) -> Option<Pivot> {
        self.entries[(i - 1) as usize][v]
            .first()
            .map(|&(level, source)| Pivot { source, level })
    }

    /// All covering sources of v at scale i, ascending (level, source).
    pub fn covering(&self, v: NodeId, i: u32) -> Vec<(Dist, NodeId)> {
        self.entries[(i - 1) as usize][v].iter().copied().collect()
    }

    pub(crate) fn corrupt_drop_min(&mut self, v: NodeId, i: u32) -> bool {
        let set = &mut self.entries[(i - 1) as usize][v];
        if let Some(&min) = set.first() {
            set.remove(&min);
            true
        } else {
            false
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(source: NodeId, scale: u32, node: NodeId, change: MembershipChange) -> MembershipEvent {
        MembershipEvent {
            source,
            scale,
            node,
            change,
        }
    }

    #[test]
    fn min_tracking_and_tie_break() {
        let mut t = PivotTable::new(6, 2);
        t.apply(&[
            ev(3, 1, 0, MembershipChange::Added { level: 2 }),
            ev(5, 1, 0, MembershipChange::Added { level: 2 }),
            ev(1, 2, 0, MembershipChange::Added { level: 4 }),
        ]);
        // Equal levels break toward the lower source id.
        assert_eq!(t.pivot(0, 1), Some(Pivot { source: 3, level: 2 }));
        assert_eq!(t.pivot(0, 2), Some(Pivot { source: 1, level: 4 }));
        assert_eq!(t.pivot(1, 1), None);

        // The closer source rising past the other flips the pivot.
        t.apply(&[ev(3, 1, 0, MembershipChange::LevelChanged { old: 2, new: 5 })]);
        assert_eq!(t.pivot(0, 1), Some(Pivot { source: 5, level: 2 }));

        // Removing the last cover empties the pivot.
        t.apply(&[
            ev(5, 1, 0, MembershipChange::Removed { old: 2 }),
            ev(3, 1, 0, MembershipChange::Removed { old: 5 }),
        ]);
        assert_eq!(t.pivot(0, 1), None);
        assert_eq!(t.applied(), 6);
    }

    #[test]
    fn covering_lists_all_sources_in_order() {
        let mut t = PivotTable::new(4, 1);
        t.apply(&[
            ev(2, 1, 3, MembershipChange::Added { level: 7 }),
            ev(0, 1, 3, MembershipChange::Added { level: 1 }),
            ev(1, 1, 3, MembershipChange::Added { level: 7 }),
        ]);
        assert_eq!(t.covering(3, 1), vec![(1, 0), (7, 1), (7, 2)]);
    }

    #[test]
    fn corrupt_drop_removes_current_minimum() {
        let mut t = PivotTable::new(2, 1);
        t.apply(&[
            ev(0, 1, 1, MembershipChange::Added { level: 1 }),
            ev(1, 1, 1, MembershipChange::Added { level: 3 }),
        ]);
        assert!(t.corrupt_drop_min(1, 1));
        assert_eq!(t.pivot(1, 1), Some(Pivot { source: 1, level: 3 }));
    }
}
