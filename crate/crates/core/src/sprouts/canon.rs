//! Canonical keys.
//!
//! Each group of regions linked by shared vertices is encoded separately as
//! the least token string over all vertex relabelings, boundary rotations,
//! per-region reflections and orderings of boundaries and regions. Labels are
//! numbered by first appearance, so the string is built greedily one boundary
//! at a time: every boundary chunk ends with a terminator that sorts below
//! all vertex tokens, which makes the candidate chunks prefix-free and the
//! least string a concatenation of least chunks. Ties branch.

use super::SproutsPosition;
use crate::game::Key;

const END_REGION: u32 = 0;
const END_BOUNDARY: u32 = 1;
const LABEL_BASE: u32 = 8;
const NONE: u32 = u32::MAX;

fn digit(deg: u8) -> u32 {
    2 + deg as u32
}

fn label(id: u32, dead: bool) -> u32 {
    LABEL_BASE + 2 * id + dead as u32
}

/// Canonical key of a position (no reduction applied).
pub fn canonical_key(p: &SproutsPosition) -> Key {
    let mut parts: Vec<String> = p
        .region_components(false)
        .iter()
        .map(|ids| render_tokens(&component_tokens(p, ids)))
        .collect();
    parts.sort();
    let mut s = parts.join("+");
    s.push('!');
    Key::from(s)
}

fn render_tokens(tokens: &[u32]) -> String {
    let mut s = String::with_capacity(tokens.len());
    for &t in tokens {
        match t {
            END_REGION => s.push('}'),
            END_BOUNDARY => s.push('.'),
            2..=5 => s.push((b'0' + (t - 2) as u8) as char),
            _ => {
                let id = (t - LABEL_BASE) / 2;
                let dead = (t - LABEL_BASE) % 2 == 1;
                match (id < 26, dead) {
                    (true, false) => s.push((b'A' + id as u8) as char),
                    (true, true) => s.push((b'a' + id as u8) as char),
                    (false, false) => s.push_str(&format!("({id})")),
                    (false, true) => s.push_str(&format!("[{id}]")),
                }
            }
        }
    }
    s
}

fn component_tokens(p: &SproutsPosition, region_ids: &[usize]) -> Vec<u32> {
    let mut local = vec![NONE; p.degree.len()];
    let mut deg = Vec::new();
    let mut occ: Vec<u8> = Vec::new();
    let mut regions = Vec::with_capacity(region_ids.len());
    for &ri in region_ids {
        let mut nr = Vec::new();
        for b in &p.regions[ri] {
            let mut nb = Vec::with_capacity(b.len());
            for &v in b {
                if local[v as usize] == NONE {
                    local[v as usize] = deg.len() as u32;
                    deg.push(p.degree[v as usize]);
                    occ.push(0);
                }
                let l = local[v as usize];
                occ[l as usize] += 1;
                nb.push(l);
            }
            nr.push(nb);
        }
        regions.push(nr);
    }
    let n = deg.len();
    let mut c = Canon {
        bnd_done: regions.iter().map(|r: &Vec<Vec<u32>>| vec![false; r.len()]).collect(),
        region_done: vec![false; regions.len()],
        regions_left: regions.len(),
        regions,
        deg,
        occ,
        labels: vec![NONE; n],
        next_label: 0,
        out: Vec::new(),
        best: None,
        cands: Vec::new(),
        fresh_arena: Vec::new(),
        buf: Vec::new(),
        fresh: Vec::new(),
        best_chunk: Vec::new(),
    };
    c.search(None);
    c.best.unwrap_or_default()
}

struct Canon {
    regions: Vec<Vec<Vec<u32>>>,
    deg: Vec<u8>,
    occ: Vec<u8>,
    labels: Vec<u32>,
    next_label: u32,
    region_done: Vec<bool>,
    regions_left: usize,
    bnd_done: Vec<Vec<bool>>,
    out: Vec<u32>,
    best: Option<Vec<u32>>,
    /// Tied candidates of every open step, innermost last.
    cands: Vec<Candidate>,
    fresh_arena: Vec<u32>,
    buf: Vec<u32>,
    fresh: Vec<u32>,
    best_chunk: Vec<u32>,
}

#[derive(Clone, Copy)]
struct Candidate {
    region: usize,
    reversed: bool,
    boundary: usize,
    fresh_at: usize,
    fresh_len: usize,
}

impl Canon {
    /// Tokens of one boundary read from `rot` in the given direction, into
    /// `self.buf`; newly labeled vertices go to `self.fresh`.
    fn chunk(&mut self, r: usize, reversed: bool, b: usize, rot: usize) {
        self.buf.clear();
        self.fresh.clear();
        let s = &self.regions[r][b];
        let len = s.len();
        for k in 0..len {
            let idx = if reversed { (rot + len - k) % len } else { (rot + k) % len };
            let v = s[idx];
            let vi = v as usize;
            let t = if self.occ[vi] == 1 {
                digit(self.deg[vi])
            } else {
                let id = if self.labels[vi] != NONE {
                    self.labels[vi]
                } else {
                    let pos = match self.fresh.iter().position(|&f| f == v) {
                        Some(p) => p,
                        None => {
                            self.fresh.push(v);
                            self.fresh.len() - 1
                        }
                    };
                    self.next_label + pos as u32
                };
                label(id, self.deg[vi] == 3)
            };
            self.buf.push(t);
        }
        self.buf.push(END_BOUNDARY);
    }

    /// True when the current output can no longer beat the best string.
    fn beaten(&self) -> bool {
        match &self.best {
            Some(best) => self.out.as_slice() > &best[..self.out.len()],
            None => false,
        }
    }

    fn consider(&mut self, r: usize, rev: bool, b: usize, base: usize) {
        for rot in 0..self.regions[r][b].len() {
            self.chunk(r, rev, b, rot);
            let ord = if self.cands.len() == base {
                std::cmp::Ordering::Less
            } else {
                self.buf.cmp(&self.best_chunk)
            };
            match ord {
                std::cmp::Ordering::Less => {
                    self.best_chunk.clone_from(&self.buf);
                    let keep = self.cands.get(base).map_or(self.fresh_arena.len(), |c| c.fresh_at);
                    self.fresh_arena.truncate(keep);
                    self.cands.truncate(base);
                }
                std::cmp::Ordering::Equal => {}
                std::cmp::Ordering::Greater => continue,
            }
            let label_free = !self.buf.iter().any(|&t| t >= LABEL_BASE);
            let dup = self.cands[base..].iter().any(|c| {
                c.region == r
                    && c.reversed == rev
                    && (label_free
                        || (c.boundary == b && self.fresh_arena[c.fresh_at..c.fresh_at + c.fresh_len] == self.fresh[..]))
            });
            if !dup {
                let fresh_at = self.fresh_arena.len();
                self.fresh_arena.extend_from_slice(&self.fresh);
                self.cands.push(Candidate { region: r, reversed: rev, boundary: b, fresh_at, fresh_len: self.fresh.len() });
            }
        }
    }

    fn search(&mut self, cur: Option<(usize, bool)>) {
        if let Some((r, _)) = cur {
            if self.bnd_done[r].iter().all(|&d| d) {
                self.out.push(END_REGION);
                self.region_done[r] = true;
                self.regions_left -= 1;
                if !self.beaten() {
                    self.search(None);
                }
                self.regions_left += 1;
                self.region_done[r] = false;
                self.out.pop();
                return;
            }
        } else if self.regions_left == 0 {
            if self.best.as_ref().map_or(true, |b| self.out < *b) {
                self.best = Some(self.out.clone());
            }
            return;
        }

        let base = self.cands.len();
        let arena_base = self.fresh_arena.len();
        match cur {
            Some((r, rev)) => {
                for b in 0..self.regions[r].len() {
                    if !self.bnd_done[r][b] {
                        self.consider(r, rev, b, base);
                    }
                }
            }
            None => {
                for r in 0..self.regions.len() {
                    if self.region_done[r] {
                        continue;
                    }
                    for rev in [false, true] {
                        for b in 0..self.regions[r].len() {
                            self.consider(r, rev, b, base);
                        }
                    }
                }
            }
        }

        let out_base = self.out.len();
        let chunk = std::mem::take(&mut self.best_chunk);
        self.out.extend_from_slice(&chunk);
        self.best_chunk = chunk;
        if !self.beaten() {
            let top = self.cands.len();
            for ci in base..top {
                let cand = self.cands[ci];
                for k in 0..cand.fresh_len {
                    let v = self.fresh_arena[cand.fresh_at + k];
                    self.labels[v as usize] = self.next_label + k as u32;
                }
                self.next_label += cand.fresh_len as u32;
                self.bnd_done[cand.region][cand.boundary] = true;
                if !self.beaten() {
                    self.search(Some((cand.region, cand.reversed)));
                }
                self.bnd_done[cand.region][cand.boundary] = false;
                self.next_label -= cand.fresh_len as u32;
                for k in 0..cand.fresh_len {
                    let v = self.fresh_arena[cand.fresh_at + k];
                    self.labels[v as usize] = NONE;
                }
            }
        }
        self.out.truncate(out_base);
        self.cands.truncate(base);
        self.fresh_arena.truncate(arena_base);
    }
}
