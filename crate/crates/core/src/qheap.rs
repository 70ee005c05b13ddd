//! Dense keyed min-structure over sample slots.
//!
//! Keys are small slot indices (positions within the Q sample), values are
//! u16 distances. The min is kept materialised: updates that raise the
//! current argmin trigger a rescan, everything else is O(1). At the fleet
//! sizes this library runs at (hundreds of slots), the rescan is a short
//! linear pass over a contiguous u16 array.

use crate::dist::{Dist, INF};

const ABSENT: u16 = u16::MAX;

/// Converts a distance to the stored form; INF and anything unstorable
/// must be handled by the caller (entries are only stored under caps far
/// below u16::MAX).
#[inline]
fn to_u16(d: Dist) -> u16 {
    debug_assert!(d < ABSENT as Dist);
    d as u16
}

#[derive(Debug, Clone)]
pub struct QSlotHeap {
    vals: Box<[u16]>,
    len: u16,
    min_val: u16,
    min_slot: u16,
}

impl QSlotHeap {
    pub fn new(slots: usize) -> Self {
        debug_assert!(slots < ABSENT as usize);
        QSlotHeap {
            vals: vec![ABSENT; slots].into_boxed_slice(),
            len: 0,
            min_val: ABSENT,
            min_slot: 0,
        }
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[cfg(test)]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, slot: usize) -> bool {
        self.vals[slot] != ABSENT
    }

    pub fn get(&self, slot: usize) -> Option<Dist> {
        match self.vals[slot] {
            ABSENT => None,
            v => Some(v as Dist),
        }
    }

    /// Smallest value with its slot; ties resolve to the lowest slot.
    #[cfg(test)]
    pub fn min(&self) -> Option<(Dist, usize)> {
        if self.len == 0 {
            None
        } else {
            Some((self.min_val as Dist, self.min_slot as usize))
        }
    }

    /// Min as a plain distance, INF when empty.
    pub fn min_value(&self) -> Dist {
        if self.len == 0 {
            INF
        } else {
            self.min_val as Dist
        }
    }

    /// Inserts or updates a key.
    pub fn set(&mut self, slot: usize, value: Dist) {
        let v = to_u16(value);
        let old = self.vals[slot];
        if old == v {
            return;
        }
        self.vals[slot] = v;
        if old == ABSENT {
            self.len += 1;
        }
        if v < self.min_val || (v == self.min_val && (slot as u16) < self.min_slot) {
            self.min_val = v;
            self.min_slot = slot as u16;
        } else if slot as u16 == self.min_slot && v > old {
            self.rescan();
        }
    }

    /// Removes a key if present.
    pub fn remove(&mut self, slot: usize) {
        if self.vals[slot] == ABSENT {
            return;
        }
        self.vals[slot] = ABSENT;
        self.len -= 1;
        if slot as u16 == self.min_slot {
            self.rescan();
        }
    }

    fn rescan(&mut self) {
        let mut best = ABSENT;
        let mut best_slot = 0u16;
        for (i, &v) in self.vals.iter().enumerate() {
            if v < best {
                best = v;
                best_slot = i as u16;
            }
        }
        self.min_val = best;
        self.min_slot = best_slot;
    }

    /// Live (slot, value) pairs, ascending by slot.
    pub fn iter(&self) -> impl Iterator<Item = (usize, Dist)> + '_ {
        self.vals
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != ABSENT)
            .map(|(i, &v)| (i, v as Dist))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_tracks_updates() {
        let mut h = QSlotHeap::new(4);
        assert_eq!(h.min(), None);
        assert_eq!(h.min_value(), INF);
        h.set(2, 7);
        h.set(0, 9);
        assert_eq!(h.min(), Some((7, 2)));
        h.set(0, 3);
        assert_eq!(h.min(), Some((3, 0)));
        // Raising the argmin forces a rescan.
        h.set(0, 20);
        assert_eq!(h.min(), Some((7, 2)));
        h.remove(2);
        assert_eq!(h.min(), Some((20, 0)));
        h.remove(0);
        assert_eq!(h.min(), None);
        assert!(h.is_empty());
    }

    #[test]
    fn ties_resolve_to_lowest_slot() {
        let mut h = QSlotHeap::new(3);
        h.set(2, 5);
        h.set(1, 5);
        assert_eq!(h.min(), Some((5, 1)));
        h.set(0, 5);
        assert_eq!(h.min(), Some((5, 0)));
        // After removing the argmin the rescan also picks the lowest slot.
        h.remove(0);
        assert_eq!(h.min(), Some((5, 1)));
    }

    #[test]
    fn idempotent_set_and_iter() {
        let mut h = QSlotHeap::new(3);
        h.set(1, 4);
        h.set(1, 4);
        assert_eq!(h.len(), 1);
        h.set(0, 6);
        let items: Vec<_> = h.iter().collect();
        assert_eq!(items, vec![(0, 6), (1, 4)]);
    }
}
