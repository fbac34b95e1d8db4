//! Shared-memory parallel DFPN: several searchers over one table, spread
//! apart by virtual disproof numbers and told to back off when a couple on
//! their path is solved elsewhere.

use std::sync::atomic::{AtomicBool, Ordering};

use dashmap::DashMap;
use spots_core::Game;

use crate::dfpn::{run, Limits, Tables};
use crate::gndb::GrundyDatabase;
use crate::node::{ChildCache, Pos};
use crate::tt::{CoupleKey, TranspositionTable};
use crate::{SearchConfig, SearchError, Solved};

/// Which threads have each couple on their current path.
pub struct Registry {
    paths: DashMap<CoupleKey, u64>,
    signals: Vec<AtomicBool>,
}

impl Registry {
    pub const MAX_THREADS: usize = 64;

    pub fn new(threads: usize) -> Self {
        assert!((1..=Self::MAX_THREADS).contains(&threads), "between 1 and 64 search threads");
        Registry { paths: DashMap::new(), signals: (0..threads).map(|_| AtomicBool::new(false)).collect() }
    }

    pub fn enter(&self, key: &CoupleKey, tid: usize) {
        *self.paths.entry(key.clone()).or_insert(0) |= 1 << tid;
    }

    pub fn leave(&self, key: &CoupleKey, tid: usize) {
        self.paths.remove_if_mut(key, |_, mask| {
            *mask &= !(1 << tid);
            *mask == 0
        });
    }

    /// `th(key)`: threads whose path contains the couple.
    pub fn count(&self, key: &CoupleKey) -> u32 {
        self.paths.get(key).map_or(0, |m| m.count_ones())
    }

    /// Signals every other thread that has `key` on its path.
    pub fn notify_solved(&self, key: &CoupleKey, from: usize) {
        let Some(mask) = self.paths.get(key).map(|m| *m) else { return };
        for (t, s) in self.signals.iter().enumerate() {
            if t != from && mask & (1 << t) != 0 {
                s.store(true, Ordering::Release);
            }
        }
    }

    /// Consumes the thread's pending backtrack signal.
    pub fn take_signal(&self, tid: usize) -> bool {
        self.signals[tid].swap(false, Ordering::AcqRel)
    }

    pub fn is_idle(&self) -> bool {
        self.paths.is_empty()
    }
}

/// Solves `root + *nim` with `threads` search threads.
pub fn pdfpn_solve<G: Game>(
    game: &G,
    root: &G::Position,
    nim: u32,
    tt: &TranspositionTable,
    db: &GrundyDatabase,
    threads: usize,
    cfg: &SearchConfig,
) -> Result<Solved, SearchError> {
    let cache = ChildCache::new(cfg.child_cache);
    let root = Pos::from_raw(game, root);
    let t = Tables { tt, db, cache: &cache };
    let report = run(game, &root, nim, t, cfg, threads, Limits { budget: cfg.budget, ..Limits::default() })?;
    match report.numbers.outcome() {
        Some(win) => Ok(Solved { win, stats: report.stats }),
        None => Err(SearchError::BudgetExceeded(report.stats.expansions)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use spots_core::Key;

    #[test]
    fn counters_balance() {
        let r = Registry::new(4);
        let k = (Key::from("x"), 0);
        r.enter(&k, 0);
        r.enter(&k, 2);
        assert_eq!(r.count(&k), 2);
        r.notify_solved(&k, 0);
        assert!(!r.take_signal(0));
        assert!(r.take_signal(2));
        assert!(!r.take_signal(2));
        r.leave(&k, 0);
        r.leave(&k, 2);
        assert_eq!(r.count(&k), 0);
        assert!(r.is_idle());
    }

    #[test]
    fn no_thread_no_signal() {
        let r = Registry::new(2);
        r.notify_solved(&(Key::from("y"), 1), 0);
        assert!(!r.take_signal(1));
    }
}
