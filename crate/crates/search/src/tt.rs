//! Bounded transposition table with effort-based garbage collection.

use std::collections::hash_map::{DefaultHasher, Entry};
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use parking_lot::Mutex;
use spots_core::{Key, Numbers};

/// A couple `P + *n` by the canonical key of `P`.
pub type CoupleKey = (Key, u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TtEntry {
    pub numbers: Numbers,
    /// Expansions spent below the entry since it was created.
    pub effort: u64,
}

pub struct TranspositionTable {
    shards: Vec<Mutex<HashMap<CoupleKey, TtEntry>>>,
    capacity: usize,
    len: AtomicUsize,
    peak: AtomicUsize,
    gc_runs: AtomicU64,
    gc: Mutex<()>,
}

impl TranspositionTable {
    pub fn new(capacity: usize) -> Self {
        Self::with_shards(capacity, 1)
    }

    pub fn with_shards(capacity: usize, shards: usize) -> Self {
        assert!(capacity >= 1, "table capacity must be positive");
        let shards = shards.clamp(1, 256);
        TranspositionTable {
            shards: (0..shards).map(|_| Mutex::new(HashMap::new())).collect(),
            capacity,
            len: AtomicUsize::new(0),
            peak: AtomicUsize::new(0),
            gc_runs: AtomicU64::new(0),
            gc: Mutex::new(()),
        }
    }

    fn shard(&self, key: &CoupleKey) -> &Mutex<HashMap<CoupleKey, TtEntry>> {
        if self.shards.len() == 1 {
            return &self.shards[0];
        }
        let mut h = DefaultHasher::new();
        key.hash(&mut h);
        &self.shards[h.finish() as usize % self.shards.len()]
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.len.load(Ordering::Relaxed)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn peak(&self) -> usize {
        self.peak.load(Ordering::Relaxed)
    }

    pub fn gc_runs(&self) -> u64 {
        self.gc_runs.load(Ordering::Relaxed)
    }

    pub fn get(&self, key: &CoupleKey) -> Option<TtEntry> {
        self.shard(key).lock().get(key).copied()
    }

    pub fn numbers(&self, key: &CoupleKey) -> Option<Numbers> {
        self.get(key).map(|e| e.numbers)
    }

    /// Inserts or updates an entry, adding `effort` to its running total.
    /// Solved numbers are never replaced by unsolved ones. Returns the
    /// numbers now stored.
    pub fn store(&self, key: &CoupleKey, numbers: Numbers, effort: u64) -> Numbers {
        loop {
            let mut shard = self.shard(key).lock();
            match shard.entry(key.clone()) {
                Entry::Occupied(mut e) => {
                    let cur = e.get_mut();
                    cur.effort = cur.effort.saturating_add(effort);
                    if !cur.numbers.is_solved() {
                        cur.numbers = numbers;
                    } else {
                        debug_assert!(
                            !numbers.is_solved() || numbers.outcome() == cur.numbers.outcome(),
                            "contradictory solved values for {key:?}"
                        );
                    }
                    return cur.numbers;
                }
                Entry::Vacant(v) => {
                    if self.reserve() {
                        v.insert(TtEntry { numbers, effort });
                        return numbers;
                    }
                }
            }
            drop(shard);
            self.collect();
        }
    }

    fn reserve(&self) -> bool {
        let mut cur = self.len.load(Ordering::Relaxed);
        loop {
            if cur >= self.capacity {
                return false;
            }
            match self.len.compare_exchange_weak(cur, cur + 1, Ordering::AcqRel, Ordering::Relaxed) {
                Ok(_) => {
                    self.peak.fetch_max(cur + 1, Ordering::Relaxed);
                    return true;
                }
                Err(now) => cur = now,
            }
        }
    }

    /// Evicts unsolved entries of least effort until the load is at most
    /// 80% of capacity, then solved entries if that was not enough.
    pub fn collect(&self) {
        let _gc = self.gc.lock();
        if self.len() < self.capacity {
            return;
        }
        let mut guards: Vec<_> = self.shards.iter().map(|s| s.lock()).collect();
        let total: usize = guards.iter().map(|g| g.len()).sum();
        let target = self.capacity * 4 / 5;
        if total <= target {
            return;
        }
        let mut victims: Vec<(bool, u64, usize, CoupleKey)> = guards
            .iter()
            .enumerate()
            .flat_map(|(i, g)| g.iter().map(move |(k, e)| (e.numbers.is_solved(), e.effort, i, k.clone())))
            .collect();
        victims.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let excess = total - target;
        for (_, _, i, k) in victims.into_iter().take(excess) {
            guards[i].remove(&k);
        }
        self.len.fetch_sub(excess, Ordering::AcqRel);
        self.gc_runs.fetch_add(1, Ordering::Relaxed);
    }

    pub fn clear(&self) {
        let mut guards: Vec<_> = self.shards.iter().map(|s| s.lock()).collect();
        for g in guards.iter_mut() {
            g.clear();
        }
        self.len.store(0, Ordering::Release);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use spots_core::Pn;

    fn key(s: &str) -> CoupleKey {
        (Key::from(s), 0)
    }

    #[test]
    fn evicts_least_effort_first() {
        let tt = TranspositionTable::new(2);
        tt.store(&key("a"), Numbers::LEAF, 1);
        tt.store(&key("b"), Numbers::LEAF, 5);
        tt.store(&key("c"), Numbers::LEAF, 9);
        assert!(tt.get(&key("a")).is_none());
        assert!(tt.get(&key("c")).is_some());
        assert!(tt.peak() <= 2);
    }

    #[test]
    fn solved_entries_stay_solved() {
        let tt = TranspositionTable::new(8);
        tt.store(&key("a"), Numbers::PROVED, 0);
        let n = tt.store(&key("a"), Numbers { pn: Pn::new(3), dn: Pn::new(2) }, 4);
        assert_eq!(n, Numbers::PROVED);
        assert_eq!(tt.get(&key("a")).unwrap().effort, 4);
    }

    #[test]
    fn unsolved_go_before_solved() {
        let tt = TranspositionTable::new(3);
        tt.store(&key("s1"), Numbers::PROVED, 0);
        tt.store(&key("s2"), Numbers::DISPROVED, 0);
        tt.store(&key("u"), Numbers::LEAF, 100);
        tt.store(&key("v"), Numbers::LEAF, 0);
        assert!(tt.get(&key("u")).is_none());
        assert!(tt.get(&key("s1")).is_some() && tt.get(&key("s2")).is_some());
    }
}
