//! The worker side: runs jobs with DFPN until the master shuts it down.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use spots_core::{Game, Key, Numbers};
use spots_search::dfpn::run;
use spots_search::node::Pos;
use spots_search::{ChildCache, GrundyDatabase, Limits, SearchConfig, Tables, TranspositionTable};
use spots_transport::{chunk_delta, GnEntry, Incoming, Job, Message, Num, Status, WorkerLink};

use crate::ClusterError;

/// Source tag of database entries received from the master.
pub const FROM_MASTER: u32 = u32::MAX - 1;

/// Workers of one group share a Grundy database. The cursor marks how far
/// the group has reported its own findings.
#[derive(Default)]
pub struct Group {
    pub db: GrundyDatabase,
    cursor: Mutex<usize>,
}

impl Group {
    pub fn new() -> Self {
        Self::default()
    }

    /// Entries found by the group since the last call.
    pub fn take_delta(&self) -> Vec<GnEntry> {
        let mut c = self.cursor.lock().unwrap();
        let (d, head) = self.db.delta(*c, Some(FROM_MASTER));
        *c = head;
        d.into_iter().map(|(k, g)| (k.to_string(), g)).collect()
    }

    fn merge(&self, delta: &[GnEntry]) -> Result<(), ClusterError> {
        for (k, g) in delta {
            self.db.insert_from(Key::from(k.as_str()), *g, FROM_MASTER).map_err(spots_search::SearchError::from)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct WorkerConfig {
    pub worker_id: u32,
    pub group_id: u32,
    pub threads: usize,
    pub search: SearchConfig,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct WorkerSummary {
    pub jobs: u64,
    pub expansions: u64,
    pub progress_sent: u64,
}

/// Serves jobs until `Shutdown`. The transposition table and successor
/// cache live as long as the worker.
pub fn worker_run<G: Game>(game: &G, link: &WorkerLink, group: &Group, cfg: &WorkerConfig) -> Result<WorkerSummary, ClusterError> {
    link.send(&Message::hello(cfg.worker_id, cfg.group_id, cfg.threads as u32))?;
    let tt = TranspositionTable::new(cfg.search.tt_capacity);
    let cache = ChildCache::new(cfg.search.child_cache);
    let mut summary = WorkerSummary::default();
    loop {
        match link.recv() {
            Incoming::Msg(Message::Assign { job }) => {
                group.merge(&job.gn_delta)?;
                if !run_job(game, link, group, Tables { tt: &tt, db: &group.db, cache: &cache }, cfg, &job, &mut summary)? {
                    return Ok(summary);
                }
            }
            Incoming::Msg(Message::Sync { gn_delta }) => group.merge(&gn_delta)?,
            Incoming::Msg(Message::Shutdown {}) => return Ok(summary),
            Incoming::Msg(m) => return Err(ClusterError::Unexpected(m.kind())),
            Incoming::Closed => return Err(ClusterError::Link(spots_transport::LinkError::Closed)),
            Incoming::Error(error) => return Err(ClusterError::Protocol { worker: cfg.worker_id as usize, error }),
        }
    }
}

fn send_delta(link: &WorkerLink, delta: Vec<GnEntry>) -> Vec<GnEntry> {
    let mut chunks = chunk_delta(delta);
    let last = chunks.pop().unwrap_or_default();
    for c in chunks {
        let _ = link.send(&Message::Sync { gn_delta: c });
    }
    last
}

/// Runs one job; returns false if the master asked to stop meanwhile.
fn run_job<G: Game>(
    game: &G,
    link: &WorkerLink,
    group: &Group,
    tables: Tables<'_, G::Position>,
    cfg: &WorkerConfig,
    job: &Job,
    summary: &mut WorkerSummary,
) -> Result<bool, ClusterError> {
    let pos = game.parse(&job.position).map_err(|_| ClusterError::BadPosition(Key::from(job.position.as_str())))?;
    let root = Pos::from_raw(game, &pos);
    let stop = AtomicBool::new(false);
    let finished = AtomicBool::new(false);
    let shutdown = AtomicBool::new(false);
    let sent = Mutex::new(0u64);
    let job_id = job.job_id;
    let hook = |done: u64, n: Numbers| {
        let gn_delta = send_delta(link, group.take_delta());
        let _ = link.send(&Message::Progress { job_id, pn: Num(n.pn), dn: Num(n.dn), iterations_done: done, gn_delta });
        *sent.lock().unwrap() += 1;
    };
    let report = std::thread::scope(|s| {
        s.spawn(|| {
            while !finished.load(Ordering::Acquire) {
                match link.recv_timeout(Duration::from_millis(20)) {
                    None => {}
                    Some(Incoming::Msg(Message::Sync { gn_delta })) => {
                        let _ = group.merge(&gn_delta);
                    }
                    Some(other) => {
                        if !matches!(other, Incoming::Msg(Message::Shutdown {})) {
                            log::warn!("worker {}: {other:?} during a job", cfg.worker_id);
                        }
                        shutdown.store(true, Ordering::Release);
                        stop.store(true, Ordering::Release);
                        break;
                    }
                }
            }
        });
        let limits = Limits { budget: Some(job.iterations), stop: Some(&stop), updates: job.updates, progress: Some(&hook) };
        let r = run(game, &root, job.nim, tables, &cfg.search, cfg.threads, limits);
        finished.store(true, Ordering::Release);
        r
    })?;
    summary.jobs += 1;
    summary.expansions += report.stats.expansions;
    summary.progress_sent += *sent.lock().unwrap();
    if shutdown.load(Ordering::Acquire) {
        return Ok(false);
    }
    let status = match report.numbers.outcome() {
        Some(true) => Status::Proved,
        Some(false) => Status::Disproved,
        None if report.stats.expansions >= job.iterations => Status::BudgetExhausted,
        None => Status::Stopped,
    };
    let children = report.children.iter().map(|(k, m, n)| (k.to_string(), *m, Num(n.pn), Num(n.dn))).collect();
    let gn_delta = send_delta(link, group.take_delta());
    link.send(&Message::Done {
        job_id,
        status,
        pn: Num(report.numbers.pn),
        dn: Num(report.numbers.dn),
        iterations_done: report.stats.expansions,
        children,
        gn_delta,
    })?;
    Ok(true)
}
