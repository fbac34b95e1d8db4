//! Memoized exhaustive search: ground truth for small positions.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::game::{Game, Key};
use crate::num::{mex, nim_sum};

pub const DEFAULT_BUDGET: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum BudgetExceeded {
    #[error("oracle budget of {0} memoized states exceeded")]
    States(usize),
    #[error("oracle deadline passed")]
    Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Win,
    Loss,
}

impl Outcome {
    pub fn is_win(self) -> bool {
        self == Outcome::Win
    }

    pub fn from_win(win: bool) -> Outcome {
        if win {
            Outcome::Win
        } else {
            Outcome::Loss
        }
    }
}

/// Brute-force solver with caches keyed by canonical key.
pub struct Oracle<'g, G: Game> {
    game: &'g G,
    budget: usize,
    outcomes: HashMap<Key, Outcome>,
    grundy: HashMap<Key, u32>,
    couples: HashMap<(Key, u32), Outcome>,
    deadline: Option<Instant>,
    /// Also compute the mex over children of sums and compare with the xor.
    pub cross_check: bool,
}

impl<'g, G: Game> Oracle<'g, G> {
    pub fn new(game: &'g G) -> Self {
        Oracle::with_budget(game, DEFAULT_BUDGET)
    }

    pub fn with_budget(game: &'g G, budget: usize) -> Self {
        Oracle { game, budget, outcomes: HashMap::new(), grundy: HashMap::new(), couples: HashMap::new(), deadline: None, cross_check: false }
    }

    /// Gives up with [`BudgetExceeded::Time`] after `limit`.
    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.deadline = Some(Instant::now() + limit);
        self
    }

    pub fn states(&self) -> usize {
        self.outcomes.len() + self.grundy.len() + self.couples.len()
    }

    /// Grundy values computed so far.
    pub fn grundy_cache(&self) -> &HashMap<Key, u32> {
        &self.grundy
    }

    fn charge(&self) -> Result<(), BudgetExceeded> {
        let n = self.states();
        if n >= self.budget {
            return Err(BudgetExceeded::States(self.budget));
        }
        match self.deadline {
            Some(d) if n % 256 == 0 && Instant::now() > d => Err(BudgetExceeded::Time),
            _ => Ok(()),
        }
    }

    /// Plain negamax over whole positions, no decomposition.
    pub fn brute_outcome(&mut self, p: &G::Position) -> Result<Outcome, BudgetExceeded> {
        let key = self.game.key(p);
        self.outcome_keyed(p, key)
    }

    fn outcome_keyed(&mut self, p: &G::Position, key: Key) -> Result<Outcome, BudgetExceeded> {
        if let Some(&o) = self.outcomes.get(&key) {
            return Ok(o);
        }
        self.charge()?;
        let mut result = Outcome::Loss;
        for (c, k) in self.game.children_keyed(p) {
            if self.outcome_keyed(&c, k)? == Outcome::Loss {
                result = Outcome::Win;
                break;
            }
        }
        self.outcomes.insert(key, result);
        Ok(result)
    }

    /// Grundy value: xor over components, mex over children for atomic ones.
    pub fn brute_grundy(&mut self, p: &G::Position) -> Result<u32, BudgetExceeded> {
        let parts = self.game.decompose_keyed(p);
        self.grundy_parts(p, parts)
    }

    fn grundy_known(&mut self, p: &G::Position, key: &Key) -> Result<u32, BudgetExceeded> {
        let parts = self.game.decompose_known(p, key);
        self.grundy_parts(p, parts)
    }

    fn grundy_parts(&mut self, p: &G::Position, parts: Vec<(G::Position, Key)>) -> Result<u32, BudgetExceeded> {
        let mut x = 0;
        for (c, k) in &parts {
            x ^= self.atomic_grundy(c, k.clone())?;
        }
        if self.cross_check && parts.len() > 1 {
            let key = self.game.key(p);
            let direct = self.mex_of_children(p, key)?;
            assert_eq!(direct, x, "Grundy value of a sum differs from the xor of its components");
        }
        Ok(x)
    }

    fn atomic_grundy(&mut self, p: &G::Position, key: Key) -> Result<u32, BudgetExceeded> {
        if let Some(&g) = self.grundy.get(&key) {
            return Ok(g);
        }
        self.mex_of_children(p, key)
    }

    fn mex_of_children(&mut self, p: &G::Position, key: Key) -> Result<u32, BudgetExceeded> {
        if let Some(&g) = self.grundy.get(&key) {
            return Ok(g);
        }
        self.charge()?;
        let mut values = Vec::new();
        for (c, k) in self.game.children_keyed(p) {
            values.push(self.grundy_known(&c, &k)?);
        }
        let g = mex(values);
        self.grundy.insert(key, g);
        Ok(g)
    }

    /// Outcome of `P + *n`, stopping at the first losing child. Components
    /// other than the largest are valued with [`Oracle::lazy_grundy`].
    pub fn couple_outcome(&mut self, p: &G::Position, nim: u32) -> Result<Outcome, BudgetExceeded> {
        let parts = self.game.decompose_keyed(p);
        self.couple_parts(parts, nim)
    }

    fn couple_parts(&mut self, mut parts: Vec<(G::Position, Key)>, mut nim: u32) -> Result<Outcome, BudgetExceeded> {
        let Some((last, key)) = parts.pop() else {
            return Ok(Outcome::from_win(nim != 0));
        };
        for (c, k) in &parts {
            nim ^= self.lazy_grundy_atomic(c, k)?;
        }
        self.atomic_couple(&last, key, nim)
    }

    fn atomic_couple(&mut self, p: &G::Position, key: Key, nim: u32) -> Result<Outcome, BudgetExceeded> {
        if let Some(&g) = self.grundy.get(&key) {
            return Ok(Outcome::from_win(g != nim));
        }
        let slot = (key, nim);
        if let Some(&o) = self.couples.get(&slot) {
            return Ok(o);
        }
        self.charge()?;
        let mut result = Outcome::Loss;
        let mut kids: Vec<Vec<(G::Position, Key)>> =
            self.game.children_keyed(p).into_iter().map(|(c, k)| self.game.decompose_known(&c, &k)).collect();
        if kids.iter().any(|parts| self.cached_couple(parts, nim) == Some(Outcome::Loss)) {
            result = Outcome::Win;
            kids.clear();
        }
        kids.sort_by_cached_key(|parts| parts.iter().map(|(c, _)| self.game.heuristic_rank(c)).max().unwrap_or(0));
        for parts in kids {
            if self.couple_parts(parts, nim)? == Outcome::Loss {
                result = Outcome::Win;
                break;
            }
        }
        if result == Outcome::Loss {
            for m in 0..nim {
                if self.atomic_couple(p, slot.0.clone(), m)? == Outcome::Loss {
                    result = Outcome::Win;
                    break;
                }
            }
        }
        if result == Outcome::Loss {
            self.grundy.insert(slot.0.clone(), nim);
        }
        self.couples.insert(slot, result);
        Ok(result)
    }

    fn cached_couple(&self, parts: &[(G::Position, Key)], nim: u32) -> Option<Outcome> {
        let Some(((_, last), rest)) = parts.split_last() else {
            return Some(Outcome::from_win(nim != 0));
        };
        let mut x = nim;
        for (_, k) in rest {
            x ^= *self.grundy.get(k)?;
        }
        match self.grundy.get(last) {
            Some(&g) => Some(Outcome::from_win(g != x)),
            None => self.couples.get(&(last.clone(), x)).copied(),
        }
    }

    /// Grundy value found as the least `m` with `P + *m` lost.
    pub fn lazy_grundy(&mut self, p: &G::Position) -> Result<u32, BudgetExceeded> {
        let mut x = 0;
        for (c, k) in self.game.decompose_keyed(p) {
            x ^= self.lazy_grundy_atomic(&c, &k)?;
        }
        Ok(x)
    }

    fn lazy_grundy_atomic(&mut self, p: &G::Position, key: &Key) -> Result<u32, BudgetExceeded> {
        if let Some(&g) = self.grundy.get(key) {
            return Ok(g);
        }
        let mut m = 0;
        while self.atomic_couple(p, key.clone(), m)? == Outcome::Win {
            m += 1;
        }
        Ok(m)
    }

    /// Grundy values of a list of positions, combined by xor.
    pub fn grundy_of_sum(&mut self, parts: &[G::Position]) -> Result<u32, BudgetExceeded> {
        let mut vals = Vec::new();
        for p in parts {
            vals.push(self.brute_grundy(p)?);
        }
        Ok(nim_sum(vals))
    }
}
