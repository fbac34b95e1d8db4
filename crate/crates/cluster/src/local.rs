//! A master and its workers inside one process, over channels or over
//! loopback TCP.

use std::sync::Arc;
use std::time::Duration;

use spots_core::Game;
use spots_search::GrundyDatabase;
use spots_transport::{connect, in_process, Endpoint, MasterLink, WorkerLink};

use crate::master::{master_run, ClusterOutcome};
use crate::worker::{worker_run, Group};
use crate::{ClusterConfig, ClusterError};

const WORKER_STACK: usize = 256 << 20;

type Opener = Box<dyn FnOnce() -> std::io::Result<WorkerLink> + Send>;

fn run_with<G: Game>(
    game: &G,
    root: &G::Position,
    nim: u32,
    cfg: &ClusterConfig,
    db: Arc<GrundyDatabase>,
    workers: Vec<Opener>,
    master: impl FnOnce() -> Result<MasterLink, ClusterError>,
) -> Result<(ClusterOutcome, Vec<Arc<Group>>), ClusterError> {
    let groups: Vec<Arc<Group>> = (0..cfg.groups()).map(|_| Arc::new(Group::new())).collect();
    let outcome = std::thread::scope(|s| {
        let handles: Vec<_> = workers
            .into_iter()
            .enumerate()
            .map(|(i, open)| {
                let group = groups[cfg.group_of(i) as usize].clone();
                let wcfg = cfg.worker(i);
                std::thread::Builder::new()
                    .name(format!("worker-{i}"))
                    .stack_size(WORKER_STACK)
                    .spawn_scoped(s, move || {
                        let link = open()?;
                        worker_run(game, &link, &group, &wcfg)
                    })
                    .expect("failed to spawn a worker thread")
            })
            .collect();
        // workers may still be connecting while the master link opens
        let outcome = master().and_then(|m| master_run(game, root, nim, cfg, &m, db));
        for h in handles {
            if let Err(e) = h.join().expect("worker thread panicked") {
                log::debug!("worker ended with {e}");
            }
        }
        outcome
    })?;
    Ok((outcome, groups))
}

/// Runs `cfg.workers` workers on threads, connected by channels. Returns
/// the group databases next to the outcome.
pub fn solve_in_process<G: Game>(
    game: &G,
    root: &G::Position,
    nim: u32,
    cfg: &ClusterConfig,
    db: Arc<GrundyDatabase>,
) -> Result<(ClusterOutcome, Vec<Arc<Group>>), ClusterError> {
    cfg.validate().map_err(ClusterError::Config)?;
    let (master, links) = in_process(cfg.workers);
    let opens = links.into_iter().map(|l| Box::new(move || Ok(l)) as Opener).collect();
    run_with(game, root, nim, cfg, db, opens, || Ok(master))
}

/// Same as [`solve_in_process`], with every worker talking to the master
/// over a loopback TCP connection.
pub fn solve_tcp_local<G: Game>(
    game: &G,
    root: &G::Position,
    nim: u32,
    cfg: &ClusterConfig,
    db: Arc<GrundyDatabase>,
) -> Result<(ClusterOutcome, Vec<Arc<Group>>), ClusterError> {
    cfg.validate().map_err(ClusterError::Config)?;
    let ep = Endpoint::bind("127.0.0.1:0")?;
    let addr = ep.local_addr()?;
    let opens = (0..cfg.workers).map(|_| Box::new(move || connect(addr, 50, Duration::from_millis(20))) as Opener).collect();
    run_with(game, root, nim, cfg, db, opens, || Ok(ep.accept(cfg.workers)?))
}
