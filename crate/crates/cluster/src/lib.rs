//! Job-level parallel search. A master grows a PNS tree and hands its most
//! proving leaves to workers as jobs; each worker runs (parallel) DFPN on
//! the leaf for a bounded number of iterations and reports numbers and the
//! Grundy values it found.

pub mod local;
pub mod master;
pub mod worker;

use spots_core::Key;
use spots_search::{SearchConfig, SearchError, TieBreak};
use spots_transport::{LinkError, ProtocolError};
use thiserror::Error;

pub use local::{solve_in_process, solve_tcp_local};
pub use master::{master_run, ClusterOutcome, ClusterStats};
pub use worker::{worker_run, Group, WorkerConfig, WorkerSummary};

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterConfig {
    pub workers: usize,
    /// Most expansions per job.
    pub iterations: u64,
    /// Expansions between two progress reports.
    pub updates: u64,
    /// Workers per group; a group shares one Grundy database.
    pub grouping: usize,
    /// Search threads per worker.
    pub threads: usize,
    pub tt_capacity: usize,
    pub seed: u64,
    /// Order equal children by the game's heuristic.
    pub heuristic: bool,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            workers: 1,
            iterations: 10_000,
            updates: 1_000,
            grouping: 1,
            threads: 1,
            tt_capacity: 1_000_000,
            seed: 0,
            heuristic: false,
        }
    }
}

impl ClusterConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.workers < 1 || self.grouping < 1 || self.threads < 1 {
            return Err("workers, grouping and threads must be at least 1".into());
        }
        if self.updates < 1 || self.iterations < self.updates {
            return Err("need iterations >= updates >= 1".into());
        }
        Ok(())
    }

    /// Group of the `i`-th local worker.
    pub fn group_of(&self, i: usize) -> u32 {
        (i / self.grouping) as u32
    }

    pub fn groups(&self) -> usize {
        self.workers.div_ceil(self.grouping)
    }

    pub fn search(&self) -> SearchConfig {
        let tie_break = match (self.heuristic, self.seed) {
            (true, _) => TieBreak::Heuristic,
            (false, 0) => TieBreak::KeyOrder,
            (false, s) => TieBreak::Seeded(s),
        };
        SearchConfig { tt_capacity: self.tt_capacity, tie_break, ..SearchConfig::default() }
    }

    pub fn worker(&self, i: usize) -> WorkerConfig {
        WorkerConfig { worker_id: i as u32, group_id: self.group_of(i), threads: self.threads, search: self.search() }
    }
}

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("worker {0} was lost")]
    WorkerLost(u32),
    #[error("no workers left")]
    NoWorkers,
    #[error("worker {worker}: {error}")]
    Protocol { worker: usize, error: ProtocolError },
    #[error("unexpected {0} message")]
    Unexpected(&'static str),
    #[error("position {0} does not parse")]
    BadPosition(Key),
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
