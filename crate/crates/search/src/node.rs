//! Couple classification, the children cache and table lookups shared by
//! every engine.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use parking_lot::Mutex;
use spots_core::{nim_sum, Game, Key, Numbers};

use crate::gndb::GrundyDatabase;
use crate::tt::{CoupleKey, TranspositionTable};
use crate::TieBreak;

/// How a reduced position splits into components.
#[derive(Clone, Debug)]
pub enum Form<P> {
    Empty,
    Atomic,
    /// Components sorted smallest first; the last one is the residual.
    Sum(Vec<(P, Key)>),
}

impl<P: Clone> Form<P> {
    pub fn of<G: Game<Position = P>>(game: &G, pos: &P, key: &Key) -> Form<P> {
        let mut parts = game.decompose_known(pos, key);
        match parts.len() {
            0 => Form::Empty,
            1 => {
                debug_assert_eq!(&parts.pop().unwrap().1, key, "reduced atomic positions keep their key");
                Form::Atomic
            }
            _ => Form::Sum(parts),
        }
    }
}

/// A reduced position with its key and form.
#[derive(Clone, Debug)]
pub struct Pos<P> {
    pub pos: P,
    pub key: Key,
    pub form: Form<P>,
}

impl<P: Clone> Pos<P> {
    pub fn new<G: Game<Position = P>>(game: &G, pos: P, key: Key) -> Pos<P> {
        let form = Form::of(game, &pos, &key);
        Pos { pos, key, form }
    }

    /// Classifies a position that may not be reduced yet.
    pub fn from_raw<G: Game<Position = P>>(game: &G, pos: &P) -> Pos<P> {
        let parts = game.decompose_keyed(pos);
        match parts.len() {
            0 => {
                let e = game.empty();
                let key = game.key(&e);
                Pos { pos: e, key, form: Form::Empty }
            }
            1 => {
                let (pos, key) = parts.into_iter().next().unwrap();
                Pos { pos, key, form: Form::Atomic }
            }
            _ => {
                let whole = game.sum(&parts.iter().map(|p| p.0.clone()).collect::<Vec<_>>());
                let key = game.key(&whole);
                Pos { pos: whole, key, form: Form::Sum(parts) }
            }
        }
    }
}

/// Successors of atomic positions, keyed by canonical key. Bounded: when
/// full, the cache is emptied.
pub struct ChildCache<P> {
    shards: Vec<Mutex<HashMap<Key, Arc<Vec<Pos<P>>>>>>,
    per_shard: usize,
}

impl<P: Clone> ChildCache<P> {
    pub fn new(capacity: usize) -> Self {
        let n = if capacity >= 4096 { 16 } else { 1 };
        ChildCache { shards: (0..n).map(|_| Mutex::new(HashMap::new())).collect(), per_shard: capacity / n }
    }

    pub fn children<G: Game<Position = P>>(&self, game: &G, pos: &P, key: &Key) -> Arc<Vec<Pos<P>>> {
        if self.per_shard == 0 {
            return Arc::new(generate(game, pos));
        }
        let mut h = DefaultHasher::new();
        key.hash(&mut h);
        let shard = &self.shards[h.finish() as usize % self.shards.len()];
        if let Some(c) = shard.lock().get(key) {
            return c.clone();
        }
        let c = Arc::new(generate(game, pos));
        let mut s = shard.lock();
        if s.len() >= self.per_shard {
            s.clear();
        }
        s.insert(key.clone(), c.clone());
        c
    }
}

fn generate<G: Game>(game: &G, pos: &G::Position) -> Vec<Pos<G::Position>> {
    game.children_keyed(pos).into_iter().map(|(c, k)| Pos::new(game, c, k)).collect()
}

/// Ordering key among children with equal numbers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TieKey {
    Key(Key, u32),
    Hash(u64),
    Rank(u64, Key, u32),
}

impl TieKey {
    pub fn new<G: Game>(policy: TieBreak, game: &G, pos: &G::Position, key: &Key, nim: u32) -> TieKey {
        match policy {
            TieBreak::KeyOrder => TieKey::Key(key.clone(), nim),
            TieBreak::Seeded(seed) => {
                let mut h = DefaultHasher::new();
                (seed, key, nim).hash(&mut h);
                TieKey::Hash(h.finish())
            }
            TieBreak::Heuristic => TieKey::Rank(game.heuristic_rank(pos), key.clone(), nim),
        }
    }
}

/// Numbers of `P + *nim` known without search: from the table, from the
/// Grundy database, or from the shape of the couple.
pub fn known<P>(tt: &TranspositionTable, db: &GrundyDatabase, p: &Pos<P>, nim: u32) -> Option<Numbers> {
    if let Some(n) = tt.numbers(&(p.key.clone(), nim)) {
        if n.is_solved() {
            return Some(n);
        }
        return Some(resolve(tt, db, p, nim).filter(|r| r.is_solved()).unwrap_or(n));
    }
    resolve(tt, db, p, nim)
}

fn resolve<P>(tt: &TranspositionTable, db: &GrundyDatabase, p: &Pos<P>, nim: u32) -> Option<Numbers> {
    match &p.form {
        Form::Empty => Some(Numbers::solved(nim != 0)),
        Form::Atomic => db.get(&p.key).map(|g| Numbers::solved(g != nim)),
        Form::Sum(parts) => {
            let (last, rest) = parts.split_last().unwrap();
            let mut x = nim;
            for (_, k) in rest {
                x ^= db.get(k)?;
            }
            match db.get(&last.1) {
                Some(g) => Some(Numbers::solved(g != x)),
                None => tt.numbers(&(last.1.clone(), x)),
            }
        }
    }
}

/// Numbers of a couple, falling back to a fresh leaf.
pub fn lookup<P>(tt: &TranspositionTable, db: &GrundyDatabase, p: &Pos<P>, nim: u32) -> Numbers {
    known(tt, db, p, nim).unwrap_or(Numbers::LEAF)
}

pub fn couple_key<P>(p: &Pos<P>, nim: u32) -> CoupleKey {
    (p.key.clone(), nim)
}

/// Nim value the residual must be paired with once the other components
/// are known.
pub fn residual_nim(nim: u32, known: &[u32]) -> u32 {
    nim ^ nim_sum(known.iter().copied())
}
