//! Best-first proof-number search with Grundy numbers on a DAG of couples.
//!
//! Node kinds: atomic couples, decomposable couples, and Grundy nodes that
//! compute `gn(Q)` by trying `Q + *0, Q + *1, ...` in turn. Nodes are merged
//! by key and every touched node is kept.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;
use std::time::Instant;

use spots_core::{pn_sum, Game, Key, Numbers, Pn};

use crate::gndb::{GrundyDatabase, LOCAL};
use crate::node::{ChildCache, Form, Pos, TieKey};
use crate::stats::SearchStats;
use crate::{DecompPolicy, SearchConfig, SearchError, Solved, TieBreak};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NodeKey {
    Couple(Key, u32),
    Grundy(Key),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// An atomic (or empty) position with a heap.
    Atomic,
    /// A sum of two or more components with a heap.
    Sum,
    /// Computes the Grundy number of an atomic position.
    Grundy,
}

#[derive(Clone, Debug)]
pub struct Node<P> {
    pub key: NodeKey,
    pub kind: Kind,
    pub pos: Pos<P>,
    pub nim: u32,
    pub numbers: Numbers,
    /// `None` until expanded.
    pub children: Option<Vec<NodeId>>,
    pub parents: Vec<NodeId>,
    pub locks: u32,
    /// Grundy nodes: the value once found.
    pub gn: Option<u32>,
    tie: TieKey,
}

impl<P> Node<P> {
    pub fn is_solved(&self) -> bool {
        match self.kind {
            Kind::Grundy => self.gn.is_some(),
            _ => self.numbers.is_solved(),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_none()
    }
}

/// The explicit search DAG.
pub struct PnsTree<'g, G: Game> {
    game: &'g G,
    nodes: Vec<Node<G::Position>>,
    index: HashMap<NodeKey, NodeId>,
    /// Couple nodes by position key, to settle them when a value is learned.
    by_pos: HashMap<Key, Vec<NodeId>>,
    db: Arc<GrundyDatabase>,
    cache: ChildCache<G::Position>,
    tie_break: TieBreak,
    decomp: DecompPolicy,
    root: NodeId,
    pub expansions: u64,
}

impl<'g, G: Game> PnsTree<'g, G> {
    pub fn new(game: &'g G, root: &G::Position, nim: u32, db: Arc<GrundyDatabase>, cfg: &SearchConfig) -> Self {
        let mut t = PnsTree {
            game,
            nodes: Vec::new(),
            index: HashMap::new(),
            by_pos: HashMap::new(),
            db,
            cache: ChildCache::new(cfg.child_cache),
            tie_break: cfg.tie_break,
            decomp: cfg.decomp,
            root: 0,
            expansions: 0,
        };
        let root = Pos::from_raw(game, root);
        t.root = t.couple(root, nim);
        t
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node<G::Position> {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn db(&self) -> &Arc<GrundyDatabase> {
        &self.db
    }

    pub fn get(&self, key: &NodeKey) -> Option<NodeId> {
        self.index.get(key).copied()
    }

    pub fn root_numbers(&self) -> Numbers {
        self.nodes[self.root].numbers
    }

    /// `Some(win)` once the root is solved.
    pub fn outcome(&self) -> Option<bool> {
        self.root_numbers().outcome()
    }

    fn initial(&self, pos: &Pos<G::Position>, nim: u32) -> Numbers {
        match &pos.form {
            Form::Empty => Numbers::solved(nim != 0),
            Form::Atomic => self.db.get(&pos.key).map_or(Numbers::LEAF, |g| Numbers::solved(g != nim)),
            Form::Sum(parts) => {
                let mut x = nim;
                for (_, k) in parts {
                    match self.db.get(k) {
                        Some(g) => x ^= g,
                        None => return Numbers::LEAF,
                    }
                }
                Numbers::solved(x != 0)
            }
        }
    }

    /// The couple node `pos + *nim`, created if needed.
    pub fn couple(&mut self, pos: Pos<G::Position>, nim: u32) -> NodeId {
        let key = NodeKey::Couple(pos.key.clone(), nim);
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let numbers = self.initial(&pos, nim);
        let kind = if matches!(pos.form, Form::Sum(_)) { Kind::Sum } else { Kind::Atomic };
        let tie = TieKey::new(self.tie_break, self.game, &pos.pos, &pos.key, nim);
        if kind == Kind::Atomic {
            self.by_pos.entry(pos.key.clone()).or_default().push(self.nodes.len());
        }
        self.push_node(Node { key, kind, pos, nim, numbers, children: None, parents: Vec::new(), locks: 0, gn: None, tie })
    }

    fn grundy(&mut self, pos: Pos<G::Position>) -> NodeId {
        let key = NodeKey::Grundy(pos.key.clone());
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let gn = self.db.get(&pos.key);
        let tie = TieKey::new(self.tie_break, self.game, &pos.pos, &pos.key, 0);
        let numbers = if gn.is_some() { Numbers::new(Pn::ZERO, Pn::ZERO) } else { Numbers::LEAF };
        self.push_node(Node { key, kind: Kind::Grundy, pos, nim: 0, numbers, children: None, parents: Vec::new(), locks: 0, gn, tie })
    }

    fn push_node(&mut self, n: Node<G::Position>) -> NodeId {
        let id = self.nodes.len();
        self.index.insert(n.key.clone(), id);
        self.nodes.push(n);
        id
    }

    fn link(&mut self, parent: NodeId, child: NodeId) {
        self.nodes[child].parents.push(parent);
        self.nodes[parent].children.get_or_insert_with(Vec::new).push(child);
    }

    /// Most-proving leaf: a path from the root, skipping locked leaves.
    pub fn select(&self) -> Result<Vec<NodeId>, SearchError> {
        if self.nodes[self.root].is_solved() {
            return Err(SearchError::NoUnsolvedLeaf);
        }
        let mut path = Vec::new();
        let mut dead = HashSet::new();
        if self.descend(self.root, &mut path, &mut dead) {
            Ok(path)
        } else {
            Err(SearchError::NoUnsolvedLeaf)
        }
    }

    fn descend(&self, id: NodeId, path: &mut Vec<NodeId>, dead: &mut HashSet<NodeId>) -> bool {
        let n = &self.nodes[id];
        if n.is_solved() || dead.contains(&id) {
            return false;
        }
        path.push(id);
        let found = match &n.children {
            None => n.locks == 0,
            Some(_) => self.candidates(id).into_iter().any(|c| self.descend(c, path, dead)),
        };
        if !found {
            path.pop();
            dead.insert(id);
        }
        found
    }

    /// Children in selection order.
    pub fn candidates(&self, id: NodeId) -> Vec<NodeId> {
        let n = &self.nodes[id];
        let Some(ch) = &n.children else { return Vec::new() };
        match n.kind {
            Kind::Atomic => {
                let mut v: Vec<NodeId> = ch.iter().copied().filter(|&c| !self.nodes[c].is_solved()).collect();
                v.sort_by(|&a, &b| {
                    let (x, y) = (&self.nodes[a], &self.nodes[b]);
                    (x.numbers.dn, &x.tie).cmp(&(y.numbers.dn, &y.tie))
                });
                v
            }
            Kind::Grundy => ch.last().copied().into_iter().collect(),
            Kind::Sum => {
                if let Some(r) = self.residual_of(id) {
                    return vec![r];
                }
                let mut open: Vec<(usize, NodeId)> =
                    ch.iter().copied().enumerate().filter(|&(_, c)| !self.nodes[c].is_solved()).collect();
                if self.decomp == DecompPolicy::MinPnDn {
                    open.sort_by_key(|&(i, c)| (self.nodes[c].numbers.min(), i));
                }
                open.into_iter().map(|(_, c)| c).collect()
            }
        }
    }

    fn residual_of(&self, id: NodeId) -> Option<NodeId> {
        let n = &self.nodes[id];
        let Form::Sum(parts) = &n.pos.form else { return None };
        let ch = n.children.as_ref()?;
        (ch.len() == parts.len()).then(|| *ch.last().unwrap())
    }

    /// Generates the children of an unexpanded, unsolved leaf.
    pub fn expand(&mut self, id: NodeId) -> Result<(), SearchError> {
        assert!(self.nodes[id].is_leaf(), "only leaves are expanded");
        match self.nodes[id].kind {
            Kind::Atomic => {
                self.expansions += 1;
                let pos = self.nodes[id].pos.clone();
                let nim = self.nodes[id].nim;
                let gen = match pos.form {
                    Form::Empty => Arc::new(Vec::new()),
                    _ => self.cache.children(self.game, &pos.pos, &pos.key),
                };
                let mut kids: Vec<NodeId> = gen.iter().map(|c| self.couple(c.clone(), nim)).collect();
                kids.extend((0..nim).map(|m| self.couple(pos.clone(), m)));
                kids.sort_by(|&a, &b| self.nodes[a].tie.cmp(&self.nodes[b].tie));
                self.nodes[id].children = Some(Vec::new());
                for c in kids {
                    self.link(id, c);
                }
            }
            Kind::Sum => {
                let Form::Sum(parts) = self.nodes[id].pos.form.clone() else { unreachable!() };
                self.nodes[id].children = Some(Vec::new());
                for (p, k) in &parts[..parts.len() - 1] {
                    let g = self.grundy(Pos { pos: p.clone(), key: k.clone(), form: Form::Atomic });
                    self.link(id, g);
                }
            }
            Kind::Grundy => {
                let pos = self.nodes[id].pos.clone();
                self.nodes[id].children = Some(Vec::new());
                let c = self.couple(pos, 0);
                self.link(id, c);
            }
        }
        self.update(id)
    }

    /// Atomic leaf expansion seeded with numbers reported by a worker.
    pub fn expand_with(&mut self, id: NodeId, hints: &[(Key, u32, Numbers)]) -> Result<(), SearchError> {
        self.expand(id)?;
        let hints: HashMap<(&Key, u32), Numbers> = hints.iter().map(|(k, m, n)| ((k, *m), *n)).collect();
        let kids = self.nodes[id].children.clone().unwrap_or_default();
        for c in kids {
            let n = &self.nodes[c];
            if n.is_solved() || !n.is_leaf() {
                continue;
            }
            let NodeKey::Couple(k, m) = &n.key else { continue };
            if let Some(&h) = hints.get(&(k, *m)) {
                self.set_leaf(c, h)?;
            }
        }
        self.update(id)
    }

    /// Overwrites the numbers of a leaf and propagates.
    pub fn set_leaf(&mut self, id: NodeId, numbers: Numbers) -> Result<(), SearchError> {
        let n = &mut self.nodes[id];
        if n.is_solved() || !n.is_leaf() || n.kind == Kind::Grundy {
            return Ok(());
        }
        n.numbers = numbers;
        if numbers.is_disproved() && n.kind == Kind::Atomic && !matches!(n.pos.form, Form::Empty) {
            let (k, g) = (n.pos.key.clone(), n.nim);
            self.learn(&k, g, LOCAL)?;
        }
        let parents = self.nodes[id].parents.clone();
        self.propagate(parents)
    }

    /// Marks a couple as solved, whatever its current numbers.
    pub fn force_solved(&mut self, id: NodeId, win: bool) -> Result<(), SearchError> {
        if self.nodes[id].is_solved() {
            return Ok(());
        }
        self.nodes[id].numbers = Numbers::solved(win);
        let n = &self.nodes[id];
        if !win && n.kind == Kind::Atomic && !matches!(n.pos.form, Form::Empty) {
            let (k, g) = (n.pos.key.clone(), n.nim);
            self.learn(&k, g, LOCAL)?;
        }
        let parents = self.nodes[id].parents.clone();
        self.propagate(parents)
    }

    /// Adds Grundy values learned elsewhere.
    pub fn absorb(&mut self, entries: &[(Key, u32)]) -> Result<(), SearchError> {
        self.absorb_from(entries, LOCAL)
    }

    /// Like [`PnsTree::absorb`], tagging new database entries with `source`.
    pub fn absorb_from(&mut self, entries: &[(Key, u32)], source: u32) -> Result<(), SearchError> {
        for (k, g) in entries {
            self.learn(k, *g, source)?;
        }
        Ok(())
    }

    /// Records `gn(key) = g` and settles the nodes it decides.
    fn learn(&mut self, key: &Key, g: u32, source: u32) -> Result<(), SearchError> {
        self.db.insert_from(key.clone(), g, source)?;
        let mut touched = Vec::new();
        if let Some(ids) = self.by_pos.get(key) {
            for &id in ids {
                let n = &mut self.nodes[id];
                if !n.numbers.is_solved() {
                    n.numbers = Numbers::solved(n.nim != g);
                    touched.extend(n.parents.iter().copied());
                }
            }
        }
        if let Some(&gid) = self.index.get(&NodeKey::Grundy(key.clone())) {
            touched.push(gid);
        }
        self.propagate(touched)
    }

    pub fn lock(&mut self, id: NodeId) {
        self.nodes[id].locks += 1;
    }

    pub fn unlock(&mut self, id: NodeId) {
        let n = &mut self.nodes[id];
        assert!(n.locks > 0, "unlocking a node that is not locked");
        n.locks -= 1;
    }

    pub fn locked(&self) -> Vec<NodeId> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].locks > 0).collect()
    }

    /// Recomputes `id` and everything above it that changes.
    pub fn update(&mut self, id: NodeId) -> Result<(), SearchError> {
        self.propagate(vec![id])
    }

    fn propagate(&mut self, start: Vec<NodeId>) -> Result<(), SearchError> {
        let mut queue: VecDeque<NodeId> = start.into_iter().collect();
        let mut queued: HashSet<NodeId> = queue.iter().copied().collect();
        while let Some(id) = queue.pop_front() {
            queued.remove(&id);
            let before = (self.nodes[id].numbers, self.nodes[id].gn);
            self.recompute(id)?;
            if (self.nodes[id].numbers, self.nodes[id].gn) != before {
                for &p in &self.nodes[id].parents {
                    if queued.insert(p) {
                        queue.push_back(p);
                    }
                }
            }
        }
        Ok(())
    }

    fn recompute(&mut self, id: NodeId) -> Result<(), SearchError> {
        if self.nodes[id].is_solved() || self.nodes[id].is_leaf() {
            return Ok(());
        }
        match self.nodes[id].kind {
            Kind::Atomic => {
                let ch = self.nodes[id].children.as_ref().unwrap();
                let pn = ch.iter().map(|&c| self.nodes[c].numbers.dn).min().unwrap_or(Pn::INF);
                let dn = pn_sum(ch.iter().map(|&c| self.nodes[c].numbers.pn));
                let numbers = Numbers { pn, dn };
                self.nodes[id].numbers = numbers;
                let n = &self.nodes[id];
                if numbers.is_disproved() && !matches!(n.pos.form, Form::Empty) {
                    let (k, g) = (n.pos.key.clone(), n.nim);
                    self.learn(&k, g, LOCAL)?;
                }
            }
            Kind::Grundy => loop {
                if let Some(g) = self.db.get(&self.nodes[id].pos.key) {
                    let n = &mut self.nodes[id];
                    n.gn = Some(g);
                    n.numbers = Numbers::new(Pn::ZERO, Pn::ZERO);
                    break;
                }
                let ch = self.nodes[id].children.as_ref().unwrap();
                let j = (ch.len() - 1) as u32;
                let last = self.nodes[*ch.last().unwrap()].numbers;
                if last.is_disproved() {
                    let k = self.nodes[id].pos.key.clone();
                    self.learn(&k, j, LOCAL)?;
                } else if last.is_proved() {
                    let pos = self.nodes[id].pos.clone();
                    let c = self.couple(pos, j + 1);
                    self.link(id, c);
                } else {
                    let m = last.min();
                    self.nodes[id].numbers = Numbers::new(m, m);
                    break;
                }
            },
            Kind::Sum => {
                let Form::Sum(parts) = &self.nodes[id].pos.form else { unreachable!() };
                let k = parts.len();
                let ch = self.nodes[id].children.clone().unwrap();
                if ch.len() < k {
                    let gns: Option<Vec<u32>> = ch.iter().map(|&c| self.nodes[c].gn).collect();
                    if let Some(gns) = gns {
                        let (p, key) = parts[k - 1].clone();
                        let nim = crate::node::residual_nim(self.nodes[id].nim, &gns);
                        let r = self.couple(Pos { pos: p, key, form: Form::Atomic }, nim);
                        self.link(id, r);
                    }
                }
                let ch = self.nodes[id].children.as_ref().unwrap();
                let numbers = if ch.len() == k {
                    self.nodes[*ch.last().unwrap()].numbers
                } else {
                    let s = pn_sum(ch.iter().map(|&c| self.nodes[c].numbers.pn));
                    Numbers::new(s, s)
                };
                self.nodes[id].numbers = numbers;
            }
        }
        Ok(())
    }

    /// One select-expand-update cycle.
    pub fn step(&mut self) -> Result<(), SearchError> {
        let path = self.select()?;
        let leaf = *path.last().unwrap();
        self.expand(leaf)
    }

    pub fn stats(&self) -> SearchStats {
        SearchStats {
            expansions: self.expansions,
            peak_nodes: self.nodes.len() as u64,
            gn_count: self.db.len() as u64,
            threads: 1,
            ..SearchStats::default()
        }
    }

    /// Checks the kind equation of every expanded, unsolved node.
    pub fn check_equations(&self) -> Result<(), String> {
        for (id, n) in self.nodes.iter().enumerate() {
            let Some(ch) = &n.children else { continue };
            if n.is_solved() {
                continue;
            }
            let expect = match n.kind {
                Kind::Atomic => Numbers {
                    pn: ch.iter().map(|&c| self.nodes[c].numbers.dn).min().unwrap_or(Pn::INF),
                    dn: pn_sum(ch.iter().map(|&c| self.nodes[c].numbers.pn)),
                },
                Kind::Grundy => {
                    let m = self.nodes[*ch.last().unwrap()].numbers.min();
                    Numbers::new(m, m)
                }
                Kind::Sum => match self.residual_of(id) {
                    Some(r) => self.nodes[r].numbers,
                    None => {
                        let s = pn_sum(ch.iter().map(|&c| self.nodes[c].numbers.pn));
                        Numbers::new(s, s)
                    }
                },
            };
            if expect != n.numbers {
                return Err(format!("node {id} {:?}: numbers {:?}, expected {:?}", n.key, n.numbers, expect));
            }
        }
        Ok(())
    }
}

/// Solves `root + *nim` with best-first PNS.
pub fn pns_solve<G: Game>(
    game: &G,
    root: &G::Position,
    nim: u32,
    db: Arc<GrundyDatabase>,
    cfg: &SearchConfig,
) -> Result<Solved, SearchError> {
    let start = Instant::now();
    let mut tree = PnsTree::new(game, root, nim, db, cfg);
    while tree.outcome().is_none() {
        if cfg.budget.is_some_and(|b| tree.expansions >= b) {
            return Err(SearchError::BudgetExceeded(tree.expansions));
        }
        tree.step()?;
    }
    let mut stats = tree.stats();
    stats.wall_time_seconds = start.elapsed().as_secs_f64();
    Ok(Solved { win: tree.outcome().unwrap(), stats })
}
