//! Proof-number search engines for impartial games, built on couples
//! `P + *n` and Grundy numbers.
//!
//! * [`pns`]: best-first PNS on a transposition-merged DAG.
//! * [`dfpn`]: depth-first PNS with a bounded transposition table.
//! * [`pdfpn`]: DFPN with several threads over shared tables.

pub mod dfpn;
pub mod gndb;
pub mod node;
pub mod pdfpn;
pub mod pns;
pub mod stats;
pub mod tt;

use thiserror::Error;

pub use dfpn::{dfpn_solve, Limits, RunReport, Tables, Thresholds};
pub use gndb::{GnConflict, GrundyDatabase};
pub use node::ChildCache;
pub use pdfpn::pdfpn_solve;
pub use pns::{pns_solve, PnsTree};
pub use stats::SearchStats;
pub use tt::{CoupleKey, TranspositionTable};

/// Order among children with equal numbers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    /// Canonical key, then Nim heap.
    KeyOrder,
    /// Hash of the seed and the couple.
    Seeded(u64),
    /// The game's heuristic rank, then key.
    Heuristic,
}

/// Which component a decomposable node works on before its residual
/// exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecompPolicy {
    FirstUnsolved,
    /// The component whose Grundy child has the least `min(pn, dn)`.
    MinPnDn,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub tt_capacity: usize,
    /// Expansion budget.
    pub budget: Option<u64>,
    pub tie_break: TieBreak,
    pub decomp: DecompPolicy,
    /// Entries of the successor cache; 0 disables it.
    pub child_cache: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            tt_capacity: 1_000_000,
            budget: None,
            tie_break: TieBreak::KeyOrder,
            decomp: DecompPolicy::MinPnDn,
            child_cache: 100_000,
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("expansion budget exhausted after {0} expansions")]
    BudgetExceeded(u64),
    #[error("unsound search: {0}")]
    Unsound(#[from] GnConflict),
    #[error("no unsolved leaf is available")]
    NoUnsolvedLeaf,
}

/// Outcome of a solved root: `win` for the player to move.
#[derive(Clone, Debug)]
pub struct Solved {
    pub win: bool,
    pub stats: SearchStats,
}
