//! The master: owns the PNS tree and the Grundy database, assigns jobs and
//! folds the answers back in. Everything happens on one thread, driven by
//! incoming messages.

use std::sync::Arc;
use std::time::{Duration, Instant};

use spots_core::{Game, Key, Numbers};
use spots_search::pns::{Kind, NodeId, NodeKey};
use spots_search::{GrundyDatabase, PnsTree, SearchError, SearchStats};
use spots_transport::{chunk_delta, GnEntry, Incoming, Job, MasterLink, Message};

use crate::worker::FROM_MASTER;
use crate::{ClusterConfig, ClusterError};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClusterStats {
    /// Counters of the master tree.
    pub master: SearchStats,
    /// Expansions reported by finished jobs.
    pub worker_expansions: u64,
    pub jobs: u64,
    pub progress_messages: u64,
    /// Share of the run during which workers held a job.
    pub worker_utilization: f64,
    pub requeued: u64,
    pub wall_time_seconds: f64,
}

#[derive(Clone, Debug)]
pub struct ClusterOutcome {
    pub win: bool,
    pub stats: ClusterStats,
}

struct Active {
    job_id: u64,
    node: NodeId,
    since: Instant,
}

#[derive(Default)]
struct Slot {
    group: Option<u32>,
    alive: bool,
    job: Option<Active>,
    cursor: usize,
    busy: Duration,
}

struct Master<'a, 'g, G: Game> {
    tree: PnsTree<'g, G>,
    link: &'a MasterLink,
    cfg: &'a ClusterConfig,
    slots: Vec<Slot>,
    next_job: u64,
    stats: ClusterStats,
}

/// Solves `root + *nim` with the workers behind `link`. New Grundy values
/// are recorded in `db`.
pub fn master_run<G: Game>(
    game: &G,
    root: &G::Position,
    nim: u32,
    cfg: &ClusterConfig,
    link: &MasterLink,
    db: Arc<GrundyDatabase>,
) -> Result<ClusterOutcome, ClusterError> {
    cfg.validate().map_err(ClusterError::Config)?;
    let start = Instant::now();
    let tree = PnsTree::new(game, root, nim, db, &cfg.search());
    let slots = (0..link.workers()).map(|_| Slot { alive: true, ..Slot::default() }).collect();
    let mut m = Master { tree, link, cfg, slots, next_job: 0, stats: ClusterStats::default() };
    let result = m.event_loop();
    for (i, s) in m.slots.iter_mut().enumerate() {
        if s.alive {
            let _ = link.send(i, &Message::Shutdown {});
        }
        if let Some(a) = s.job.take() {
            s.busy += a.since.elapsed();
            m.tree.unlock(a.node);
        }
    }
    assert!(m.tree.locked().is_empty(), "every assigned leaf is unlocked at the end");
    let win = result?;
    let wall = start.elapsed();
    let mut stats = m.stats;
    stats.master = m.tree.stats();
    stats.wall_time_seconds = wall.as_secs_f64();
    let busy: f64 = m.slots.iter().map(|s| s.busy.as_secs_f64()).sum();
    stats.worker_utilization = if wall.is_zero() { 0.0 } else { (busy / (m.slots.len() as f64 * wall.as_secs_f64())).min(1.0) };
    Ok(ClusterOutcome { win, stats })
}

fn to_keys(delta: &[GnEntry]) -> Vec<(Key, u32)> {
    delta.iter().map(|(k, g)| (Key::from(k.as_str()), *g)).collect()
}

impl<G: Game> Master<'_, '_, G> {
    fn event_loop(&mut self) -> Result<bool, ClusterError> {
        loop {
            if let Some(win) = self.tree.outcome() {
                return Ok(win);
            }
            self.assign_idle()?;
            if !self.slots.iter().any(|s| s.alive) {
                return Err(ClusterError::NoWorkers);
            }
            let Some((w, event)) = self.link.recv() else { return Err(ClusterError::NoWorkers) };
            match event {
                Incoming::Msg(m) => self.handle(w, m)?,
                Incoming::Closed => self.lost(w)?,
                Incoming::Error(error) => return Err(ClusterError::Protocol { worker: w, error }),
            }
        }
    }

    fn handle(&mut self, w: usize, m: Message) -> Result<(), ClusterError> {
        match m {
            Message::Hello { group_id, .. } => {
                if self.slots[w].group.is_some() || group_id >= FROM_MASTER {
                    return Err(ClusterError::Unexpected("hello"));
                }
                self.slots[w].group = Some(group_id);
            }
            Message::Sync { gn_delta } => self.absorb(w, &gn_delta)?,
            Message::Progress { job_id, pn, dn, gn_delta, .. } => {
                self.stats.progress_messages += 1;
                self.absorb(w, &gn_delta)?;
                if let Some(a) = self.slots[w].job.as_ref().filter(|a| a.job_id == job_id) {
                    let node = a.node;
                    self.tree.set_leaf(node, Numbers::new(pn.0, dn.0))?;
                }
            }
            Message::Done { job_id, pn, dn, iterations_done, children, gn_delta, .. } => {
                self.absorb(w, &gn_delta)?;
                let slot = &mut self.slots[w];
                let Some(a) = slot.job.take_if(|a| a.job_id == job_id) else { return Ok(()) };
                slot.busy += a.since.elapsed();
                self.stats.worker_expansions += iterations_done;
                self.tree.unlock(a.node);
                let numbers = Numbers::new(pn.0, dn.0);
                let node = self.tree.node(a.node);
                if node.is_solved() || !node.is_leaf() {
                    return Ok(());
                }
                match numbers.outcome() {
                    Some(win) => self.tree.force_solved(a.node, win)?,
                    None if !children.is_empty() => {
                        let hints: Vec<(Key, u32, Numbers)> =
                            children.iter().map(|(k, m, p, d)| (Key::from(k.as_str()), *m, Numbers::new(p.0, d.0))).collect();
                        self.tree.expand_with(a.node, &hints)?;
                    }
                    None => self.tree.set_leaf(a.node, numbers)?,
                }
            }
            other => return Err(ClusterError::Unexpected(other.kind())),
        }
        Ok(())
    }

    fn absorb(&mut self, w: usize, delta: &[GnEntry]) -> Result<(), ClusterError> {
        if delta.is_empty() {
            return Ok(());
        }
        let source = self.slots[w].group.ok_or(ClusterError::Unexpected("message before hello"))?;
        self.tree.absorb_from(&to_keys(delta), source)?;
        Ok(())
    }

    fn lost(&mut self, w: usize) -> Result<(), ClusterError> {
        let slot = &mut self.slots[w];
        slot.alive = false;
        let Some(a) = slot.job.take() else { return Ok(()) };
        slot.busy += a.since.elapsed();
        self.tree.unlock(a.node);
        if self.stats.requeued > 0 {
            return Err(ClusterError::WorkerLost(w as u32));
        }
        log::warn!("worker {w} was lost during job {}; requeueing", a.job_id);
        self.stats.requeued += 1;
        Ok(())
    }

    fn assign_idle(&mut self) -> Result<(), ClusterError> {
        for w in 0..self.slots.len() {
            let s = &self.slots[w];
            if !s.alive || s.group.is_none() || s.job.is_some() {
                continue;
            }
            match self.next_leaf()? {
                Some(node) => self.assign(w, node)?,
                None => break,
            }
        }
        Ok(())
    }

    /// The most-proving unlocked atomic leaf. Sum and Grundy leaves are
    /// expanded on the spot.
    fn next_leaf(&mut self) -> Result<Option<NodeId>, ClusterError> {
        loop {
            if self.tree.outcome().is_some() {
                return Ok(None);
            }
            let path = match self.tree.select() {
                Ok(p) => p,
                Err(SearchError::NoUnsolvedLeaf) => return Ok(None),
                Err(e) => return Err(e.into()),
            };
            let leaf = *path.last().unwrap();
            if self.tree.node(leaf).kind == Kind::Atomic {
                return Ok(Some(leaf));
            }
            self.tree.expand(leaf)?;
        }
    }

    fn assign(&mut self, w: usize, node: NodeId) -> Result<(), ClusterError> {
        let NodeKey::Couple(key, nim) = self.tree.node(node).key.clone() else { unreachable!("jobs are couples") };
        let slot = &mut self.slots[w];
        let group = slot.group;
        let (delta, head) = self.tree.db().delta(slot.cursor, group);
        slot.cursor = head;
        let mut chunks = chunk_delta(delta.into_iter().map(|(k, g)| (k.to_string(), g)).collect());
        let gn_delta = chunks.pop().unwrap_or_default();
        self.next_job += 1;
        let job = Job {
            job_id: self.next_job,
            position: key.to_string(),
            nim,
            iterations: self.cfg.iterations,
            updates: self.cfg.updates,
            gn_delta,
        };
        let sent = chunks
            .into_iter()
            .try_for_each(|c| self.link.send(w, &Message::Sync { gn_delta: c }))
            .and_then(|_| self.link.send(w, &Message::Assign { job }));
        if sent.is_err() {
            // the closed connection shows up as an event
            return Ok(());
        }
        self.tree.lock(node);
        self.stats.jobs += 1;
        self.slots[w].job = Some(Active { job_id: self.next_job, node, since: Instant::now() });
        Ok(())
    }
}
