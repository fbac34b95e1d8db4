//! Depth-first proof-number search with Grundy numbers.
//!
//! Atomic couples follow the usual df-pn recursion. A decomposable couple
//! searches its components through their Grundy children `Q + *j` directly,
//! bounded only by the extra threshold `mt`; once every component but the
//! last is valued it hands its thresholds unchanged to the residual couple.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Instant;

use parking_lot::Mutex;
use spots_core::{pn_sum, Game, Key, Numbers, Pn};

use crate::gndb::{GnConflict, GrundyDatabase};
use crate::node::{couple_key, lookup, ChildCache, Form, Pos, TieKey};
use crate::pdfpn::Registry;
use crate::stats::SearchStats;
use crate::tt::{CoupleKey, TranspositionTable};
use crate::{DecompPolicy, SearchConfig, SearchError, Solved, TieBreak};

/// Thresholds of a frame on the explored path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Thresholds {
    pub pt: Pn,
    pub dt: Pn,
    pub mt: Pn,
    pub ps: Pn,
    pub ds: Pn,
}

impl Thresholds {
    pub const ROOT: Thresholds = Thresholds { pt: Pn::INF, dt: Pn::INF, mt: Pn::INF, ps: Pn::ZERO, ds: Pn::ZERO };

    /// `t(v)`: the bound a decomposable node places on its component sum.
    pub fn t(&self) -> Pn {
        let m = self.mt - self.ps.min(self.ds);
        self.pt.min(self.dt).min(m)
    }
}

/// Whether the search should stay at (or enter) a node with numbers `n`.
pub fn descend_condition(n: Numbers, t: &Thresholds) -> bool {
    n.pn < t.pt && n.dn < t.dt && (n.pn + t.ps).min(n.dn + t.ds) < t.mt
}

/// Thresholds of the chosen child `w` of an atomic node `v`; `dn_w2` is the
/// disproof number of the runner-up (infinite if there is none).
pub fn child_thresholds_atomic(v: &Thresholds, vn: Numbers, w: Numbers, dn_w2: Pn) -> Thresholds {
    child_thresholds_virtual(v, vn, w, dn_w2, 0)
}

fn child_thresholds_virtual(v: &Thresholds, vn: Numbers, w: Numbers, dn_w2: Pn, th_w: u32) -> Thresholds {
    Thresholds {
        pt: v.dt - vn.dn + w.pn,
        dt: adjusted_dt(v.pt, dn_w2, th_w),
        mt: v.mt,
        ps: v.ds + vn.dn - w.pn,
        ds: v.ps,
    }
}

/// Thresholds of a Grundy child chosen by a decomposable node whose
/// residual does not exist yet.
pub fn child_thresholds_decomposable(v: &Thresholds, vn: Numbers, w: Numbers) -> Thresholds {
    Thresholds { pt: Pn::INF, dt: Pn::INF, mt: v.t() - vn.pn + w.min(), ps: Pn::ZERO, ds: Pn::ZERO }
}

/// Disproof number raised by the number of threads below the child.
pub fn effective_dn(dn: Pn, th: u32) -> Pn {
    dn + Pn::new(th as u64)
}

/// `min(pt(v), dn(w2) + 1 - th(w))`, floored at zero.
pub fn adjusted_dt(pt_v: Pn, dn_w2: Pn, th_w: u32) -> Pn {
    pt_v.min(dn_w2 + Pn::ONE - Pn::new(th_w as u64))
}

/// Why a frame stopped before its thresholds were exceeded.
#[derive(Debug)]
pub(crate) enum Stop {
    Halt,
    Unwind,
    Unsound(GnConflict),
}

/// State shared by every thread of one run.
pub(crate) struct RunShared<'a> {
    pub spent: AtomicU64,
    pub budget: Option<u64>,
    pub halted: AtomicBool,
    pub external: Option<&'a AtomicBool>,
    pub updates: u64,
    pub progress: Option<&'a (dyn Fn(u64, Numbers) + Sync)>,
    pub registry: Option<Registry>,
    pub root: Mutex<Numbers>,
}

impl<'a> RunShared<'a> {
    pub fn new(threads: usize, limits: &Limits<'a>) -> Self {
        RunShared {
            spent: AtomicU64::new(0),
            budget: limits.budget,
            halted: AtomicBool::new(false),
            external: limits.stop,
            updates: limits.updates,
            progress: limits.progress,
            registry: (threads > 1).then(|| Registry::new(threads)),
            root: Mutex::new(Numbers::LEAF),
        }
    }
}

/// Limits and hooks for one run.
#[derive(Clone, Copy, Default)]
pub struct Limits<'a> {
    /// Expansion budget; reaching it halts the run.
    pub budget: Option<u64>,
    /// External stop signal.
    pub stop: Option<&'a AtomicBool>,
    /// Period of the progress hook, in expansions; 0 disables it.
    pub updates: u64,
    /// Called with the expansions done so far and the root numbers.
    pub progress: Option<&'a (dyn Fn(u64, Numbers) + Sync)>,
}

/// Shared tables of a search.
pub struct Tables<'a, P> {
    pub tt: &'a TranspositionTable,
    pub db: &'a GrundyDatabase,
    pub cache: &'a ChildCache<P>,
}

impl<P> Clone for Tables<'_, P> {
    fn clone(&self) -> Self {
        *self
    }
}
impl<P> Copy for Tables<'_, P> {}

/// Result of a run that may stop before the root is solved.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub numbers: Numbers,
    /// Root children with their current numbers (atomic roots only).
    pub children: Vec<(Key, u32, Numbers)>,
    pub stats: SearchStats,
    /// The budget or the stop signal ended the run.
    pub halted: bool,
}

enum Src {
    Gen(usize),
    Own,
}

struct Kid {
    src: Src,
    nim: u32,
    numbers: Numbers,
    tie: TieKey,
}

/// One search thread.
pub(crate) struct Searcher<'a, G: Game> {
    game: &'a G,
    t: Tables<'a, G::Position>,
    tie_break: TieBreak,
    decomp: DecompPolicy,
    shared: &'a RunShared<'a>,
    tid: usize,
    strict: bool,
    depth_limit: usize,
    path: Vec<CoupleKey>,
    resident: u64,
    pub stats: SearchStats,
    pub trace: Option<Vec<CoupleKey>>,
}

type Exit = Result<Numbers, (Stop, Numbers)>;

impl<'a, G: Game> Searcher<'a, G> {
    pub fn new(game: &'a G, t: Tables<'a, G::Position>, cfg: &SearchConfig, shared: &'a RunShared<'a>, tid: usize) -> Self {
        Searcher {
            game,
            t,
            tie_break: cfg.tie_break,
            decomp: cfg.decomp,
            shared,
            tid,
            strict: shared.registry.is_none(),
            depth_limit: usize::MAX,
            path: Vec::new(),
            resident: 0,
            stats: SearchStats::default(),
            trace: None,
        }
    }

    /// Searches the root until it is solved or the run halts.
    pub fn run_root(&mut self, root: &Pos<G::Position>, nim: u32) -> Result<Numbers, Stop> {
        let bound = self.game.depth_bound(&root.pos);
        self.depth_limit = bound.saturating_add(nim as usize + 2).saturating_mul(16);
        loop {
            let init = lookup(self.t.tt, self.t.db, root, nim);
            if init.is_solved() {
                return Ok(init);
            }
            if self.strict {
                self.push_check(init, &Thresholds::ROOT);
            }
            match self.mid(root, nim, Thresholds::ROOT, 0, init) {
                Ok(n) if n.is_solved() => return Ok(n),
                Ok(_) | Err(Stop::Unwind) => continue,
                Err(s) => return Err(s),
            }
        }
    }

    fn numbers_of(&self, p: &Pos<G::Position>, nim: u32) -> Numbers {
        lookup(self.t.tt, self.t.db, p, nim)
    }

    fn tick(&mut self) -> Result<(), Stop> {
        let sh = self.shared;
        if sh.halted.load(Ordering::Relaxed) || sh.external.is_some_and(|s| s.load(Ordering::Relaxed)) {
            sh.halted.store(true, Ordering::Relaxed);
            return Err(Stop::Halt);
        }
        let old = sh.spent.fetch_add(1, Ordering::AcqRel);
        if sh.budget.is_some_and(|b| old >= b) {
            sh.spent.fetch_sub(1, Ordering::AcqRel);
            sh.halted.store(true, Ordering::Relaxed);
            return Err(Stop::Halt);
        }
        self.stats.expansions += 1;
        if sh.updates > 0 && (old + 1) % sh.updates == 0 {
            if let Some(hook) = sh.progress {
                hook(old + 1, *sh.root.lock());
            }
        }
        Ok(())
    }

    /// Checks the backtrack signal and the halt flag between iterations.
    fn interrupted(&mut self) -> Option<Stop> {
        let sh = self.shared;
        if sh.halted.load(Ordering::Relaxed) {
            return Some(Stop::Halt);
        }
        if let Some(reg) = &sh.registry {
            if reg.take_signal(self.tid) {
                if self.path.iter().any(|k| self.t.tt.numbers(k).is_some_and(|n| n.is_solved())) {
                    self.stats.unwinds += 1;
                    return Some(Stop::Unwind);
                }
            }
        }
        None
    }

    fn mid(&mut self, node: &Pos<G::Position>, nim: u32, th: Thresholds, depth: usize, init: Numbers) -> Result<Numbers, Stop> {
        assert!(depth <= self.depth_limit, "search path exceeds the game's depth bound");
        let key = couple_key(node, nim);
        if let Some(tr) = &mut self.trace {
            tr.push(key.clone());
        }
        self.path.push(key.clone());
        if let Some(reg) = &self.shared.registry {
            reg.enter(&key, self.tid);
        }
        self.stats.max_depth = self.stats.max_depth.max(depth as u64 + 1);
        let start = self.stats.expansions;
        let exit = match &node.form {
            Form::Sum(parts) => self.run_sum(node, parts, nim, th, depth, init),
            _ => self.run_atomic(node, nim, th, depth, init),
        };
        let (numbers, stop) = match exit {
            Ok(n) => (n, None),
            Err((s, n)) => (n, Some(s)),
        };
        let stored = self.t.tt.store(&key, numbers, self.stats.expansions - start);
        self.path.pop();
        if let Some(reg) = &self.shared.registry {
            reg.leave(&key, self.tid);
        }
        let mut conflict = None;
        if stored.is_solved() {
            if let Some(reg) = &self.shared.registry {
                reg.notify_solved(&key, self.tid);
            }
            if stored.is_disproved() && matches!(node.form, Form::Atomic) {
                if let Err(c) = self.t.db.insert(node.key.clone(), nim) {
                    conflict = Some(c);
                }
            }
        }
        if let Some(c) = conflict {
            return Err(Stop::Unsound(c));
        }
        match stop {
            None => {
                self.stats.pops += 1;
                if descend_condition(numbers, &th) {
                    self.stats.pop_violations += 1;
                }
                Ok(stored)
            }
            Some(Stop::Unwind) if stored.is_solved() => Ok(stored),
            Some(s) => Err(s),
        }
    }

    fn push_check(&mut self, n: Numbers, th: &Thresholds) {
        self.stats.pushes += 1;
        if !descend_condition(n, th) {
            self.stats.push_violations += 1;
        }
    }

    fn run_atomic(&mut self, node: &Pos<G::Position>, nim: u32, th: Thresholds, depth: usize, init: Numbers) -> Exit {
        if let Err(s) = self.tick() {
            return Err((s, init));
        }
        let gen: Arc<Vec<Pos<G::Position>>> = match node.form {
            Form::Empty => Arc::new(Vec::new()),
            _ => self.t.cache.children(self.game, &node.pos, &node.key),
        };
        let mut kids: Vec<Kid> = Vec::with_capacity(gen.len() + nim as usize);
        for (i, c) in gen.iter().enumerate() {
            let tie = TieKey::new(self.tie_break, self.game, &c.pos, &c.key, nim);
            kids.push(Kid { src: Src::Gen(i), nim, numbers: self.numbers_of(c, nim), tie });
        }
        for m in 0..nim {
            let tie = TieKey::new(self.tie_break, self.game, &node.pos, &node.key, m);
            kids.push(Kid { src: Src::Own, nim: m, numbers: self.numbers_of(node, m), tie });
        }
        kids.sort_by(|a, b| a.tie.cmp(&b.tie));
        self.resident += kids.len() as u64;
        self.stats.peak_nodes = self.stats.peak_nodes.max(self.resident);
        let r = self.atomic_loop(node, &gen, &mut kids, th, depth);
        self.resident -= kids.len() as u64;
        r
    }

    fn atomic_loop(&mut self, node: &Pos<G::Position>, gen: &[Pos<G::Position>], kids: &mut [Kid], th: Thresholds, depth: usize) -> Exit {
        let pos_of = |k: &Kid| -> &Pos<G::Position> {
            match k.src {
                Src::Gen(i) => &gen[i],
                Src::Own => node,
            }
        };
        loop {
            if !self.strict {
                for k in kids.iter_mut() {
                    k.numbers = lookup(self.t.tt, self.t.db, pos_of(k), k.nim);
                }
            }
            let n = atomic_numbers(kids);
            if depth == 0 {
                *self.shared.root.lock() = n;
            }
            if !descend_condition(n, &th) {
                return Ok(n);
            }
            if let Some(s) = self.interrupted() {
                return Err((s, n));
            }

            let (w, dn_w2, th_w) = self.select(kids, n, &th, |k| &pos_of(k).key);
            let wn = kids[w].numbers;
            if th.ds + n.dn < wn.pn {
                self.stats.nonneg_violations += 1;
            }
            let cth = child_thresholds_virtual(&th, n, wn, dn_w2, th_w);
            if self.strict {
                self.push_check(wn, &cth);
            }
            let child = pos_of(&kids[w]);
            let r = self.mid(child, kids[w].nim, cth, depth + 1, wn);
            match r {
                Ok(cn) => kids[w].numbers = cn,
                Err(s) => {
                    kids[w].numbers = lookup(self.t.tt, self.t.db, child, kids[w].nim);
                    return Err((s, atomic_numbers(kids)));
                }
            }
            if self.strict {
                let after = atomic_numbers(kids);
                let cn = kids[w].numbers;
                if !cn.pn.is_inf() && after.dn + wn.pn != n.dn + cn.pn {
                    self.stats.identity_violations += 1;
                }
            }
        }
    }

    /// Child with the least (virtual) disproof number, the runner-up's
    /// disproof number, and the thread count below the chosen child.
    fn select<'k>(&self, kids: &'k [Kid], n: Numbers, th: &Thresholds, key: impl Fn(&'k Kid) -> &'k Key) -> (usize, Pn, u32) {
        let Some(reg) = &self.shared.registry else {
            let (w, dn2) = argmin_dn(kids.iter().map(|k| k.numbers.dn), 0);
            return (w, dn2, 0);
        };
        let counts: Vec<u32> = kids
            .iter()
            .map(|k| {
                if k.numbers.is_solved() {
                    0
                } else {
                    reg.count(&(key(k).clone(), k.nim))
                }
            })
            .collect();
        let (w, dn2) = argmin_dn(kids.iter().zip(&counts).map(|(k, &c)| effective_dn(k.numbers.dn, c)), self.tid);
        let cth = child_thresholds_virtual(th, n, kids[w].numbers, dn2, counts[w]);
        if descend_condition(kids[w].numbers, &cth) {
            return (w, dn2, counts[w]);
        }
        let (w, dn2) = argmin_dn(kids.iter().map(|k| k.numbers.dn), self.tid);
        (w, dn2, 0)
    }

    fn run_sum(&mut self, node: &Pos<G::Position>, parts: &[(G::Position, Key)], nim: u32, th: Thresholds, depth: usize, init: Numbers) -> Exit {
        let _ = node;
        let (last, rest) = parts.split_last().expect("a sum has at least two components");
        let comps: Vec<Pos<G::Position>> =
            rest.iter().map(|(p, k)| Pos { pos: p.clone(), key: k.clone(), form: Form::Atomic }).collect();
        let residual = Pos { pos: last.0.clone(), key: last.1.clone(), form: Form::Atomic };
        let mut state: Vec<Component> = comps.iter().map(|_| Component::Open { cursor: 0, numbers: Numbers::LEAF }).collect();
        for i in 0..comps.len() {
            let numbers = self.numbers_of(&comps[i], 0);
            state[i] = Component::Open { cursor: 0, numbers };
        }
        let mut res_numbers: Option<Numbers> = None;
        let mut last_n = init;
        loop {
            if let Err(c) = self.settle(&comps, &mut state) {
                return Err((Stop::Unsound(c), last_n));
            }
            let known: Option<Vec<u32>> = state
                .iter()
                .map(|c| match c {
                    Component::Known(g) => Some(*g),
                    Component::Open { .. } => None,
                })
                .collect();
            if let Some(known) = known {
                let rn = crate::node::residual_nim(nim, &known);
                let rnum = match res_numbers {
                    Some(r) if self.strict => r,
                    _ => self.numbers_of(&residual, rn),
                };
                last_n = rnum;
                if depth == 0 {
                    *self.shared.root.lock() = rnum;
                }
                if !descend_condition(rnum, &th) {
                    return Ok(rnum);
                }
                if let Some(s) = self.interrupted() {
                    return Err((s, rnum));
                }
                if self.strict {
                    self.push_check(rnum, &th);
                }
                match self.mid(&residual, rn, th, depth + 1, rnum) {
                    Ok(r) => res_numbers = Some(r),
                    Err(s) => return Err((s, self.numbers_of(&residual, rn))),
                }
                continue;
            }

            let sum = pn_sum(state.iter().map(|c| match c {
                Component::Known(_) => Pn::ZERO,
                Component::Open { numbers, .. } => numbers.min(),
            }));
            let n = Numbers { pn: sum, dn: sum };
            last_n = n;
            if depth == 0 {
                *self.shared.root.lock() = n;
            }
            if !descend_condition(n, &th) {
                return Ok(n);
            }
            if let Some(s) = self.interrupted() {
                return Err((s, n));
            }
            let i = self.pick_component(&state);
            let Component::Open { cursor, numbers: wn } = state[i] else { unreachable!() };
            let cth = child_thresholds_decomposable(&th, n, wn);
            if self.strict {
                self.push_check(wn, &cth);
            }
            match self.mid(&comps[i], cursor, cth, depth + 1, wn) {
                Ok(r) => state[i] = Component::Open { cursor, numbers: r },
                Err(s) => {
                    let sum = pn_sum(state.iter().map(|c| match c {
                        Component::Known(_) => Pn::ZERO,
                        Component::Open { numbers, .. } => numbers.min(),
                    }));
                    return Err((s, Numbers { pn: sum, dn: sum }));
                }
            }
        }
    }

    /// Advances Grundy cursors past proved children and records values.
    fn settle(&mut self, comps: &[Pos<G::Position>], state: &mut [Component]) -> Result<(), GnConflict> {
        for (c, st) in comps.iter().zip(state.iter_mut()) {
            loop {
                let Component::Open { cursor, numbers } = *st else { break };
                let numbers = if self.strict { numbers } else { self.numbers_of(c, cursor) };
                if let Some(g) = self.t.db.get(&c.key) {
                    *st = Component::Known(g);
                } else if numbers.is_proved() {
                    let next = cursor + 1;
                    *st = Component::Open { cursor: next, numbers: self.numbers_of(c, next) };
                } else if numbers.is_disproved() {
                    self.t.db.insert(c.key.clone(), cursor)?;
                    *st = Component::Known(cursor);
                } else {
                    *st = Component::Open { cursor, numbers };
                    break;
                }
            }
        }
        Ok(())
    }

    fn pick_component(&self, state: &[Component]) -> usize {
        let open = state.iter().enumerate().filter_map(|(i, c)| match c {
            Component::Open { numbers, .. } => Some((i, numbers.min())),
            Component::Known(_) => None,
        });
        match self.decomp {
            DecompPolicy::FirstUnsolved => open.map(|(i, _)| i).next(),
            DecompPolicy::MinPnDn => open.min_by_key(|&(i, m)| (m, i)).map(|(i, _)| i),
        }
        .expect("an unsolved sum has an open component")
    }
}

#[derive(Clone, Copy, Debug)]
enum Component {
    Known(u32),
    Open { cursor: u32, numbers: Numbers },
}

fn atomic_numbers(kids: &[Kid]) -> Numbers {
    let pn = kids.iter().map(|k| k.numbers.dn).min().unwrap_or(Pn::INF);
    let dn = pn_sum(kids.iter().map(|k| k.numbers.pn));
    Numbers { pn, dn }
}

/// Index of the least value (ties resolved by `ordinal` among the tied
/// entries) and the least value among the others.
fn argmin_dn(values: impl Iterator<Item = Pn> + Clone, ordinal: usize) -> (usize, Pn) {
    let best = values.clone().min().unwrap_or(Pn::INF);
    let ties: Vec<usize> = values.clone().enumerate().filter(|(_, v)| *v == best).map(|(i, _)| i).collect();
    let w = ties[ordinal % ties.len()];
    let second = values.enumerate().filter(|(i, _)| *i != w).map(|(_, v)| v).min().unwrap_or(Pn::INF);
    (w, second)
}

const STACK_SIZE: usize = 256 << 20;

/// Runs DFPN on `root + *nim` with `threads` search threads sharing the
/// tables. Stops when the root is solved, the budget is spent or the stop
/// signal is raised.
pub fn run<G: Game>(
    game: &G,
    root: &Pos<G::Position>,
    nim: u32,
    t: Tables<'_, G::Position>,
    cfg: &SearchConfig,
    threads: usize,
    limits: Limits<'_>,
) -> Result<RunReport, SearchError> {
    run_inner(game, root, nim, t, cfg, threads, limits, false).map(|(r, _)| r)
}

/// Sequential run that also returns every couple pushed on the path, in
/// order.
pub fn run_traced<G: Game>(
    game: &G,
    root: &Pos<G::Position>,
    nim: u32,
    t: Tables<'_, G::Position>,
    cfg: &SearchConfig,
    limits: Limits<'_>,
) -> Result<(RunReport, Vec<CoupleKey>), SearchError> {
    run_inner(game, root, nim, t, cfg, 1, limits, true)
}

#[allow(clippy::too_many_arguments)]
fn run_inner<G: Game>(
    game: &G,
    root: &Pos<G::Position>,
    nim: u32,
    t: Tables<'_, G::Position>,
    cfg: &SearchConfig,
    threads: usize,
    limits: Limits<'_>,
    traced: bool,
) -> Result<(RunReport, Vec<CoupleKey>), SearchError> {
    let threads = threads.max(1);
    let start = Instant::now();
    let shared = RunShared::new(threads, &limits);
    let one = |tid: usize| {
        let mut s = Searcher::new(game, t, cfg, &shared, tid);
        if traced {
            s.trace = Some(Vec::new());
        }
        let r = s.run_root(root, nim);
        if matches!(r, Err(Stop::Unsound(_)) | Err(Stop::Halt)) {
            shared.halted.store(true, Ordering::Relaxed);
        }
        (r, s.stats, s.trace.unwrap_or_default())
    };
    let results: Vec<_> = if threads == 1 {
        vec![one(0)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|tid| {
                    let one = &one;
                    std::thread::Builder::new()
                        .name(format!("dfpn-{tid}"))
                        .stack_size(STACK_SIZE)
                        .spawn_scoped(scope, move || one(tid))
                        .expect("failed to spawn a search thread")
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("search thread panicked")).collect()
        })
    };

    let mut stats = SearchStats { threads: threads as u64, ..SearchStats::default() };
    let mut solved = None;
    let mut trace = Vec::new();
    for (r, s, tr) in results {
        stats.merge(&s);
        trace.extend(tr);
        match r {
            Ok(n) if n.is_solved() => solved = Some(n),
            Err(Stop::Unsound(c)) => return Err(SearchError::Unsound(c)),
            _ => {}
        }
    }
    if let Some(reg) = &shared.registry {
        debug_assert!(reg.is_idle(), "thread counters must return to zero");
    }
    let numbers = solved.unwrap_or_else(|| lookup(t.tt, t.db, root, nim));
    let children = if numbers.is_solved() { Vec::new() } else { root_children(game, t, root, nim) };
    stats.tt_entries_peak = t.tt.peak() as u64;
    stats.gn_count = t.db.len() as u64;
    stats.wall_time_seconds = start.elapsed().as_secs_f64();
    Ok((RunReport { numbers, children, stats, halted: solved.is_none() }, trace))
}

/// Children of an atomic root couple with their current numbers.
pub fn root_children<G: Game>(game: &G, t: Tables<'_, G::Position>, root: &Pos<G::Position>, nim: u32) -> Vec<(Key, u32, Numbers)> {
    let gen = match root.form {
        Form::Sum(_) => return Vec::new(),
        Form::Empty => Arc::new(Vec::new()),
        Form::Atomic => t.cache.children(game, &root.pos, &root.key),
    };
    let mut out: Vec<(Key, u32, Numbers)> = gen.iter().map(|c| (c.key.clone(), nim, lookup(t.tt, t.db, c, nim))).collect();
    out.extend((0..nim).map(|m| (root.key.clone(), m, lookup(t.tt, t.db, root, m))));
    out
}

/// Solves `root + *nim` sequentially.
pub fn dfpn_solve<G: Game>(
    game: &G,
    root: &G::Position,
    nim: u32,
    tt: &TranspositionTable,
    db: &GrundyDatabase,
    cfg: &SearchConfig,
) -> Result<Solved, SearchError> {
    crate::pdfpn::pdfpn_solve(game, root, nim, tt, db, 1, cfg)
}
