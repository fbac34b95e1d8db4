//! `spots`: solve impartial games with proof-number search and Grundy
//! numbers.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use spots_cluster::{master_run, solve_in_process, worker_run, ClusterConfig, Group};
use spots_core::analysis::{estimate_gn, estimate_plain, verify_certificate};
use spots_core::cert;
use spots_core::oracle::{Oracle, DEFAULT_BUDGET};
use spots_core::{Game, Nim, Sprouts};
use spots_search::{dfpn_solve, pdfpn_solve, pns_solve, GrundyDatabase, SearchConfig, SearchError, TieBreak, TranspositionTable};
use spots_transport::{connect, Endpoint};

const USAGE: u8 = 1;
const BUDGET: u8 = 2;
const VERIFY_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "spots", version, about = "Proof-number search with Grundy numbers for Sprouts and Nim")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve a position; prints `win` or `loss` for the player to move.
    Solve(SolveArgs),
    /// Estimate the size of the game tree by random playouts.
    Estimate(EstimateArgs),
    /// Check a Grundy certificate against the game rules.
    Verify(VerifyArgs),
    /// Run a cluster master that waits for workers on a TCP address.
    Master(MasterArgs),
    /// Run cluster workers connected to a master.
    Worker(WorkerArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GameKind {
    Sprouts,
    Nim,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Engine {
    Oracle,
    Pns,
    Dfpn,
    Pdfpn,
    Cluster,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Plain,
    Gn,
}

#[derive(Args, Clone, Debug)]
struct Tuning {
    #[arg(long, default_value_t = 1_000_000)]
    tt_capacity: usize,
    /// Search threads (per worker for clusters).
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Break ties with the game's move-ordering heuristic.
    #[arg(long)]
    heuristic: bool,
    /// Break ties by a seeded hash; 0 keeps key order.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Tuning {
    fn search(&self, budget: Option<u64>) -> SearchConfig {
        let tie_break = match (self.heuristic, self.seed) {
            (true, _) => TieBreak::Heuristic,
            (false, 0) => TieBreak::KeyOrder,
            (false, s) => TieBreak::Seeded(s),
        };
        SearchConfig { tt_capacity: self.tt_capacity, budget, tie_break, ..SearchConfig::default() }
    }
}

#[derive(Args, Clone, Debug)]
struct ClusterArgs {
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Most expansions per job.
    #[arg(long, default_value_t = 10_000)]
    iterations: u64,
    /// Expansions between progress reports.
    #[arg(long, default_value_t = 1_000)]
    updates: u64,
    /// Workers per group sharing a Grundy database.
    #[arg(long, default_value_t = 1)]
    grouping: usize,
}

impl ClusterArgs {
    fn config(&self, t: &Tuning) -> ClusterConfig {
        ClusterConfig {
            workers: self.workers,
            iterations: self.iterations,
            updates: self.updates,
            grouping: self.grouping,
            threads: t.threads,
            tt_capacity: t.tt_capacity,
            seed: t.seed,
            heuristic: t.heuristic,
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_enum)]
    game: GameKind,
    /// `0*n` or a Sprouts position; comma-separated heaps for Nim.
    #[arg(long)]
    position: String,
    #[arg(long, value_enum, default_value = "dfpn")]
    engine: Engine,
    #[command(flatten)]
    tuning: Tuning,
    #[command(flatten)]
    cluster: ClusterArgs,
    /// Grundy database: read if present, written back after the run.
    #[arg(long)]
    gn_db: Option<PathBuf>,
    /// Expansion budget (memoized states for the oracle).
    #[arg(long)]
    budget: Option<u64>,
    /// Append the stats record here instead of standard error.
    #[arg(long)]
    stats_out: Option<PathBuf>,
    /// For cluster runs, also solve sequentially to report search overhead.
    #[arg(long)]
    measure_overhead: bool,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long, value_enum)]
    game: GameKind,
    #[arg(long)]
    position: String,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, value_enum, default_value = "plain")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grundy value assumed for components; defaults to the mean of
    /// `--gn-db`, else 1.
    #[arg(long)]
    expected_gn: Option<u32>,
    #[arg(long)]
    gn_db: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    game: GameKind,
    #[arg(long)]
    gn_db: PathBuf,
}

#[derive(Args, Debug)]
struct MasterArgs {
    #[arg(long, value_enum)]
    game: GameKind,
    #[arg(long)]
    position: String,
    /// Address to listen on, e.g. 0.0.0.0:7070.
    #[arg(long)]
    listen: String,
    #[command(flatten)]
    tuning: Tuning,
    #[command(flatten)]
    cluster: ClusterArgs,
    #[arg(long)]
    gn_db: Option<PathBuf>,
    #[arg(long)]
    stats_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct WorkerArgs {
    #[arg(long, value_enum)]
    game: GameKind,
    /// Master address.
    #[arg(long)]
    connect: String,
    #[arg(long, default_value_t = 0)]
    group: u32,
    /// Workers started by this process; they share one database.
    #[arg(long, default_value_t = 1)]
    slots: usize,
    /// Identifier of the first worker.
    #[arg(long, default_value_t = 0)]
    id: u32,
    #[arg(long, default_value_t = 20)]
    retries: u32,
    #[arg(long, default_value_t = 250)]
    retry_delay_ms: u64,
    #[command(flatten)]
    tuning: Tuning,
}

macro_rules! with_game {
    ($kind:expr, |$g:ident| $body:expr) => {
        match $kind {
            GameKind::Sprouts => {
                let $g = &Sprouts;
                $body
            }
            GameKind::Nim => {
                let $g = &Nim;
                $body
            }
        }
    };
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("SPOTS_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let r = match &cli.cmd {
        Cmd::Solve(a) => with_game!(a.game, |g| solve(g, a)),
        Cmd::Estimate(a) => with_game!(a.game, |g| estimate(g, a)),
        Cmd::Verify(a) => with_game!(a.game, |g| verify(g, a)),
        Cmd::Master(a) => with_game!(a.game, |g| master(g, a)),
        Cmd::Worker(a) => with_game!(a.game, |g| worker(g, a)),
    };
    match r {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
    }
}

type Run = Result<u8, String>;

fn parse<G: Game>(game: &G, text: &str) -> Result<G::Position, String> {
    game.parse(text).map_err(|e| format!("position {text:?}: {e}"))
}

fn load_db(path: Option<&Path>) -> Result<GrundyDatabase, String> {
    match path {
        Some(p) if p.exists() => GrundyDatabase::load(p).map_err(|e| format!("{}: {e}", p.display())),
        _ => Ok(GrundyDatabase::new()),
    }
}

fn save_db(db: &GrundyDatabase, path: Option<&Path>) -> Result<(), String> {
    match path {
        Some(p) => db.save(p).map_err(|e| format!("{}: {e}", p.display())),
        None => Ok(()),
    }
}

fn emit(record: &Value, path: Option<&Path>) -> Result<(), String> {
    let line = record.to_string();
    match path {
        Some(p) => OpenOptions::new()
            .create(true)
            .append(true)
            .open(p)
            .and_then(|mut f| writeln!(f, "{line}"))
            .map_err(|e| format!("{}: {e}", p.display())),
        None => {
            eprintln!("{line}");
            Ok(())
        }
    }
}

fn outcome_word(win: bool) -> &'static str {
    if win {
        "win"
    } else {
        "loss"
    }
}

struct Outcome {
    win: Option<bool>,
    expansions: u64,
    peak_nodes: u64,
    tt_entries_peak: u64,
    search_overhead: Option<f64>,
    worker_utilization: Option<f64>,
}

fn solve<G: Game>(game: &G, a: &SolveArgs) -> Run {
    let pos = parse(game, &a.position)?;
    let db = Arc::new(load_db(a.gn_db.as_deref())?);
    let cfg = a.tuning.search(a.budget);
    let start = Instant::now();
    let solved = |win: bool, s: &spots_search::SearchStats| Outcome {
        win: Some(win),
        expansions: s.expansions,
        peak_nodes: s.peak_nodes,
        tt_entries_peak: s.tt_entries_peak,
        search_overhead: None,
        worker_utilization: None,
    };
    let exhausted = |expansions| Outcome {
        win: None,
        expansions,
        peak_nodes: 0,
        tt_entries_peak: 0,
        search_overhead: None,
        worker_utilization: None,
    };
    let search = |r: Result<spots_search::Solved, SearchError>| match r {
        Ok(s) => Ok(solved(s.win, &s.stats)),
        Err(SearchError::BudgetExceeded(n)) => Ok(exhausted(n)),
        Err(e) => Err(e.to_string()),
    };
    let out = match a.engine {
        Engine::Oracle => {
            let budget = a.budget.map_or(DEFAULT_BUDGET, |b| b as usize);
            let mut o = Oracle::with_budget(game, budget);
            let r = o.couple_outcome(&pos, 0);
            for (k, g) in o.grundy_cache() {
                let atomic = game.decompose_keyed(&game.parse(k.as_str()).map_err(|e| e.to_string())?);
                if atomic.len() == 1 && &atomic[0].1 == k {
                    db.insert(k.clone(), *g).map_err(|e| e.to_string())?;
                }
            }
            let states = o.states() as u64;
            match r {
                Ok(res) => Outcome { peak_nodes: states, expansions: states, ..solved(res.is_win(), &Default::default()) },
                Err(_) => exhausted(states),
            }
        }
        Engine::Pns => search(pns_solve(game, &pos, 0, db.clone(), &cfg))?,
        Engine::Dfpn | Engine::Pdfpn => {
            let tt = TranspositionTable::new(a.tuning.tt_capacity);
            let threads = if a.engine == Engine::Dfpn { 1 } else { a.tuning.threads };
            let r = if threads == 1 { dfpn_solve(game, &pos, 0, &tt, &db, &cfg) } else { pdfpn_solve(game, &pos, 0, &tt, &db, threads, &cfg) };
            search(r)?
        }
        Engine::Cluster => {
            let ccfg = a.cluster.config(&a.tuning);
            let (o, _) = solve_in_process(game, &pos, 0, &ccfg, db.clone()).map_err(|e| e.to_string())?;
            let overhead = if a.measure_overhead {
                let tt = TranspositionTable::new(a.tuning.tt_capacity);
                let s = dfpn_solve(game, &pos, 0, &tt, &GrundyDatabase::new(), &a.tuning.search(None)).map_err(|e| e.to_string())?;
                Some(o.stats.worker_expansions as f64 / s.stats.expansions.max(1) as f64)
            } else {
                None
            };
            Outcome {
                win: Some(o.win),
                expansions: o.stats.worker_expansions + o.stats.master.expansions,
                peak_nodes: o.stats.master.peak_nodes,
                tt_entries_peak: 0,
                search_overhead: overhead,
                worker_utilization: Some(o.stats.worker_utilization),
            }
        }
    };
    let wall = start.elapsed().as_secs_f64();
    if let Some(win) = out.win {
        println!("{}", outcome_word(win));
    }
    save_db(&db, a.gn_db.as_deref())?;
    let record = json!({
        "record": "solve",
        "game": game.name(),
        "position": a.position,
        "engine": format!("{:?}", a.engine).to_lowercase(),
        "outcome": out.win.map(outcome_word),
        "status": if out.win.is_some() { "solved" } else { "budget_exceeded" },
        "wall_time_seconds": wall,
        "expansions": out.expansions,
        "peak_nodes": out.peak_nodes,
        "tt_entries_peak": out.tt_entries_peak,
        "gn_count": db.len(),
        "search_overhead": out.search_overhead,
        "worker_utilization": out.worker_utilization,
        "config": {
            "tt_capacity": a.tuning.tt_capacity,
            "threads": a.tuning.threads,
            "heuristic": a.tuning.heuristic,
            "seed": a.tuning.seed,
            "budget": a.budget,
            "workers": a.cluster.workers,
            "iterations": a.cluster.iterations,
            "updates": a.cluster.updates,
            "grouping": a.cluster.grouping,
        },
    });
    emit(&record, a.stats_out.as_deref())?;
    Ok(if out.win.is_some() { 0 } else { BUDGET })
}

fn estimate<G: Game>(game: &G, a: &EstimateArgs) -> Run {
    if a.samples < 1 {
        return Err("--samples must be at least 1".into());
    }
    let pos = parse(game, &a.position)?;
    let (e, expected) = match a.mode {
        Mode::Plain => (estimate_plain(game, &pos, a.samples, a.seed), None),
        Mode::Gn => {
            let expected = match a.expected_gn {
                Some(g) => g,
                None => load_db(a.gn_db.as_deref())?.mean().map_or(1, |m| m.round() as u32),
            };
            (estimate_gn(game, &pos, a.samples, a.seed, expected), Some(expected))
        }
    };
    let record = json!({
        "record": "estimate",
        "game": game.name(),
        "position": a.position,
        "mode": format!("{:?}", a.mode).to_lowercase(),
        "mean": e.mean,
        "dispersion": e.dispersion,
        "samples": e.samples,
        "seed": a.seed,
        "expected_gn": expected,
    });
    println!("{record}");
    Ok(0)
}

fn verify<G: Game>(game: &G, a: &VerifyArgs) -> Run {
    let entries = cert::load(&a.gn_db).map_err(|e| format!("{}: {e}", a.gn_db.display()))?;
    let r = verify_certificate(game, &entries);
    let failures: Vec<Value> = r.failures.iter().map(|(k, why)| json!({"key": k.as_str(), "reason": why})).collect();
    let missing: Vec<&str> = r.missing_dependencies.iter().map(|k| k.as_str()).collect();
    let record = json!({
        "record": "verify",
        "game": game.name(),
        "checked": r.checked,
        "passed": r.passed(),
        "failures": failures,
        "missing_dependencies": missing,
    });
    println!("{record}");
    Ok(if r.passed() { 0 } else { VERIFY_FAILED })
}

fn master<G: Game>(game: &G, a: &MasterArgs) -> Run {
    let pos = parse(game, &a.position)?;
    let cfg = a.cluster.config(&a.tuning);
    cfg.validate()?;
    let db = Arc::new(load_db(a.gn_db.as_deref())?);
    let ep = Endpoint::bind(&a.listen).map_err(|e| format!("listen on {}: {e}", a.listen))?;
    let addr = ep.local_addr().map_err(|e| e.to_string())?;
    eprintln!("listening on {addr}, waiting for {} workers", cfg.workers);
    let link = ep.accept(cfg.workers).map_err(|e| e.to_string())?;
    let o = master_run(game, &pos, 0, &cfg, &link, db.clone()).map_err(|e| e.to_string())?;
    println!("{}", outcome_word(o.win));
    save_db(&db, a.gn_db.as_deref())?;
    let s = &o.stats;
    let record = json!({
        "record": "solve",
        "game": game.name(),
        "position": a.position,
        "engine": "cluster",
        "outcome": outcome_word(o.win),
        "status": "solved",
        "wall_time_seconds": s.wall_time_seconds,
        "expansions": s.worker_expansions + s.master.expansions,
        "peak_nodes": s.master.peak_nodes,
        "tt_entries_peak": 0,
        "gn_count": db.len(),
        "search_overhead": Value::Null,
        "worker_utilization": s.worker_utilization,
        "jobs": s.jobs,
        "config": {
            "tt_capacity": cfg.tt_capacity,
            "threads": cfg.threads,
            "heuristic": cfg.heuristic,
            "seed": cfg.seed,
            "workers": cfg.workers,
            "iterations": cfg.iterations,
            "updates": cfg.updates,
            "grouping": cfg.grouping,
        },
    });
    emit(&record, a.stats_out.as_deref())?;
    Ok(0)
}

fn worker<G: Game>(game: &G, a: &WorkerArgs) -> Run {
    let group = Group::new();
    let delay = Duration::from_millis(a.retry_delay_ms);
    let mut links = Vec::new();
    for _ in 0..a.slots.max(1) {
        let link = connect(a.connect.as_str(), a.retries, delay).map_err(|e| format!("connect to {}: {e}", a.connect))?;
        links.push(link);
    }
    let failed = std::thread::scope(|s| {
        let handles: Vec<_> = links
            .iter()
            .enumerate()
            .map(|(i, link)| {
                let cfg = spots_cluster::WorkerConfig {
                    worker_id: a.id + i as u32,
                    group_id: a.group,
                    threads: a.tuning.threads,
                    search: a.tuning.search(None),
                };
                let group = &group;
                std::thread::Builder::new()
                    .stack_size(256 << 20)
                    .spawn_scoped(s, move || worker_run(game, link, group, &cfg))
                    .expect("failed to spawn a worker thread")
            })
            .collect();
        handles
            .into_iter()
            .filter_map(|h| h.join().expect("worker thread panicked").err())
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
    });
    match failed.first() {
        Some(e) => Err(e.clone()),
        None => Ok(0),
    }
}
