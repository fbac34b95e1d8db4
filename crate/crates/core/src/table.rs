//! Finite games given by an explicit move table, for tests and estimates.
//!
//! A position is a multiset of atoms. Atom `i` may be replaced by any of the
//! multisets in `moves[i]`, whose atoms must all have smaller indices, so
//! every game is finite. Atoms without moves are terminal; distinct dead
//! atoms give distinct terminal positions.

use crate::game::{Game, Key, ParseError};

#[derive(Clone, Debug)]
pub struct TableGame {
    moves: Vec<Vec<Vec<u32>>>,
    height: Vec<usize>,
}

impl TableGame {
    pub fn new(moves: Vec<Vec<Vec<u32>>>) -> Result<TableGame, String> {
        let mut height = Vec::with_capacity(moves.len());
        for (i, opts) in moves.iter().enumerate() {
            let mut h = 0;
            for opt in opts {
                let mut sum = 0;
                for &a in opt {
                    if a as usize >= i {
                        return Err(format!("atom {i} moves to atom {a}, which is not smaller"));
                    }
                    sum += height[a as usize];
                }
                h = h.max(sum + 1);
            }
            height.push(h);
        }
        Ok(TableGame { moves, height })
    }

    /// A tree where every internal node has `b` distinct children and every
    /// leaf is at depth `d`. The root is [`TableGame::top`].
    pub fn regular(b: u32, d: u32) -> TableGame {
        // atom k * b + j is the j-th node of height k; the root comes last
        let mut moves: Vec<Vec<Vec<u32>>> = (0..b).map(|_| Vec::new()).collect();
        for k in 1..=d {
            let below: Vec<Vec<u32>> = (0..b).map(|j| vec![(k - 1) * b + j]).collect();
            let width = if k == d { 1 } else { b };
            moves.extend((0..width).map(|_| below.clone()));
        }
        TableGame::new(moves).expect("regular trees are well formed")
    }

    pub fn atoms(&self) -> usize {
        self.moves.len()
    }

    /// The last atom, which is the root of [`TableGame::regular`] trees.
    pub fn top(&self) -> Vec<u32> {
        self.position(&[self.moves.len() as u32 - 1])
    }

    fn is_dead(&self, a: u32) -> bool {
        self.moves[a as usize].is_empty()
    }

    /// The reduced position for a multiset of atoms: dead atoms are dropped
    /// unless nothing else is left.
    pub fn position(&self, atoms: &[u32]) -> Vec<u32> {
        let mut v: Vec<u32> = atoms.to_vec();
        if v.iter().any(|&a| !self.is_dead(a)) {
            v.retain(|&a| !self.is_dead(a));
        }
        v.sort_unstable();
        v
    }
}

impl Game for TableGame {
    type Position = Vec<u32>;

    fn name(&self) -> &'static str {
        "table"
    }

    fn children(&self, p: &Vec<u32>) -> Vec<Vec<u32>> {
        let mut out: Vec<Vec<u32>> = Vec::new();
        for (i, &a) in p.iter().enumerate() {
            if i > 0 && p[i - 1] == a {
                continue;
            }
            for opt in &self.moves[a as usize] {
                let mut q = p.clone();
                q.remove(i);
                q.extend_from_slice(opt);
                let q = self.position(&q);
                if !out.contains(&q) {
                    out.push(q);
                }
            }
        }
        out
    }

    fn is_terminal(&self, p: &Vec<u32>) -> bool {
        p.iter().all(|&a| self.is_dead(a))
    }

    fn decompose(&self, p: &Vec<u32>) -> Vec<Vec<u32>> {
        p.iter().filter(|&&a| !self.is_dead(a)).map(|&a| vec![a]).collect()
    }

    fn key(&self, p: &Vec<u32>) -> Key {
        let p = self.position(p);
        if p.is_empty() {
            return Key::from("-");
        }
        let parts: Vec<String> = p.iter().map(|a| a.to_string()).collect();
        Key::from(parts.join("+"))
    }

    /// Atoms joined by `+`; `-` is the empty position.
    fn parse(&self, text: &str) -> Result<Vec<u32>, ParseError> {
        let t = text.trim();
        if t == "-" || t.is_empty() {
            return Ok(Vec::new());
        }
        let mut atoms = Vec::new();
        let mut offset = 0;
        for part in t.split('+') {
            let a: u32 = part.trim().parse().map_err(|_| ParseError::new(offset, format!("bad atom {part:?}")))?;
            if a as usize >= self.moves.len() {
                return Err(ParseError::new(offset, format!("no atom {a}")));
            }
            atoms.push(a);
            offset += part.len() + 1;
        }
        Ok(self.position(&atoms))
    }

    fn sum(&self, parts: &[Vec<u32>]) -> Vec<u32> {
        self.position(&parts.concat())
    }

    fn empty(&self) -> Vec<u32> {
        Vec::new()
    }

    fn heuristic_rank(&self, p: &Vec<u32>) -> u64 {
        self.depth_bound(p) as u64
    }

    fn depth_bound(&self, p: &Vec<u32>) -> usize {
        p.iter().map(|&a| self.height[a as usize]).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaves(g: &TableGame, p: &Vec<u32>) -> u64 {
        let c = g.children(p);
        if c.is_empty() {
            1
        } else {
            c.iter().map(|q| leaves(g, q)).sum()
        }
    }

    #[test]
    fn regular_tree_shape() {
        for (b, d) in [(2, 3), (3, 2), (1, 4), (4, 1), (2, 0)] {
            let g = TableGame::regular(b, d);
            let root = g.top();
            assert_eq!(leaves(&g, &root), (b as u64).pow(d), "b={b} d={d}");
            assert_eq!(g.depth_bound(&root), d as usize);
        }
    }

    #[test]
    fn rejects_cycles() {
        assert!(TableGame::new(vec![vec![vec![0]]]).is_err());
    }

    #[test]
    fn keys_and_parse() {
        let g = TableGame::new(vec![vec![], vec![vec![0]], vec![vec![1, 1]]]).unwrap();
        let p = g.parse("2+0+1").unwrap();
        assert_eq!(p, vec![1, 2]);
        assert_eq!(g.key(&p).as_str(), "1+2");
        assert_eq!(g.children(&p), vec![vec![2], vec![1, 1, 1]]);
        assert_eq!(g.children(&vec![1]), vec![vec![0]]);
        assert!(g.is_terminal(&vec![0]));
        assert!(g.decompose(&vec![0]).is_empty());
        assert_eq!(g.key(&g.empty()).as_str(), "-");
    }
}
