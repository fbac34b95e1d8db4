//! Sprouts on a purely combinatorial board.
//!
//! A position is a list of regions. Each region holds one boundary per
//! connected piece of drawing that touches it, and a boundary is the closed
//! walk around that piece, listed as a cyclic sequence of vertex corners.
//! A vertex of degree `d` occupies `d` corners in total (an isolated spot has
//! one), so a vertex may show up in several boundaries and regions.
//!
//! See [`notation`] for the text grammar used by keys and `parse`.

mod canon;
pub mod notation;

use std::collections::HashSet;

use crate::game::{Game, Key, ParseError};

pub use canon::canonical_key;

/// Region: a list of boundaries. Boundary: a cyclic list of vertex ids.
pub type Boundary = Vec<u32>;
pub type Region = Vec<Boundary>;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SproutsPosition {
    regions: Vec<Region>,
    degree: Vec<u8>,
}

/// A raw move, addressed by region, boundary and corner indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    /// Connect corner `i` of boundary `a` with corner `j` of boundary `b`.
    Join { region: usize, a: usize, i: usize, b: usize, j: usize },
    /// Connect corners `i <= j` of boundary `b`; the other boundaries whose
    /// bit is set in `side` end up next to the walk segment `i..=j`.
    Split { region: usize, b: usize, i: usize, j: usize, side: u64 },
}

impl SproutsPosition {
    /// Builds a position from regions and per-vertex degrees.
    pub fn from_parts(regions: Vec<Region>, degree: Vec<u8>) -> Result<SproutsPosition, String> {
        let p = SproutsPosition { regions, degree };
        p.validate()?;
        Ok(p)
    }

    /// `n` isolated spots in one region.
    pub fn spots(n: usize) -> SproutsPosition {
        if n == 0 {
            return SproutsPosition::default();
        }
        SproutsPosition { regions: vec![(0..n as u32).map(|v| vec![v]).collect()], degree: vec![0; n] }
    }

    pub fn empty() -> SproutsPosition {
        SproutsPosition::default()
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn degree(&self, v: u32) -> u8 {
        self.degree[v as usize]
    }

    pub fn lives(&self, v: u32) -> u8 {
        3 - self.degree[v as usize]
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    /// Vertex ids that occur in some boundary, ascending.
    pub fn vertices(&self) -> Vec<u32> {
        let mut seen = vec![false; self.degree.len()];
        for b in self.regions.iter().flatten() {
            for &v in b {
                seen[v as usize] = true;
            }
        }
        (0..self.degree.len() as u32).filter(|&v| seen[v as usize]).collect()
    }

    pub fn total_lives(&self) -> u32 {
        self.vertices().into_iter().map(|v| self.lives(v) as u32).sum()
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<(), String> {
        let mut occ = vec![0u32; self.degree.len()];
        for (ri, region) in self.regions.iter().enumerate() {
            if region.is_empty() {
                return Err(format!("region {ri} has no boundary"));
            }
            for b in region {
                if b.is_empty() {
                    return Err(format!("region {ri} has an empty boundary"));
                }
                for &v in b {
                    let d = *self.degree.get(v as usize).ok_or_else(|| format!("unknown vertex {v}"))?;
                    if d > 3 {
                        return Err(format!("vertex {v} has degree {d}"));
                    }
                    if d == 0 && b.len() != 1 {
                        return Err(format!("isolated vertex {v} shares a boundary"));
                    }
                    occ[v as usize] += 1;
                }
            }
        }
        for (v, &n) in occ.iter().enumerate() {
            if n > (self.degree[v] as u32).max(1) {
                return Err(format!("vertex {v} has {n} corners but degree {}", self.degree[v]));
            }
        }
        Ok(())
    }

    /// Every legal move, one per choice of corners and side assignment.
    pub fn raw_moves(&self) -> Vec<Move> {
        self.move_list(false)
    }

    /// Legal moves with interchangeable isolated spots collapsed: within a
    /// region only the first spots are used as endpoints, and splits only
    /// choose how many spots go to each side. Every successor of
    /// [`raw_moves`](Self::raw_moves) is equivalent to one of these.
    pub fn reduced_moves(&self) -> Vec<Move> {
        self.move_list(true)
    }

    fn move_list(&self, reduce: bool) -> Vec<Move> {
        let mut out = Vec::new();
        for (r, region) in self.regions.iter().enumerate() {
            let is_spot = |b: usize| region[b].len() == 1 && self.degree(region[b][0]) == 0;
            let spots: Vec<usize> = (0..region.len()).filter(|&b| is_spot(b)).collect();
            // index of the k-th spot among all spots of the region
            let spot_rank = |b: usize| spots.iter().position(|&x| x == b);
            let skip_spot = |b: usize, allowed: usize| reduce && spot_rank(b).is_some_and(|k| k >= allowed);
            for a in 0..region.len() {
                if skip_spot(a, 1) {
                    continue;
                }
                for b in a + 1..region.len() {
                    if skip_spot(b, if is_spot(a) { 2 } else { 1 }) {
                        continue;
                    }
                    for (i, &u) in region[a].iter().enumerate() {
                        if self.lives(u) == 0 {
                            continue;
                        }
                        for (j, &v) in region[b].iter().enumerate() {
                            if self.lives(v) > 0 && u != v {
                                out.push(Move::Join { region: r, a, i, b, j });
                            }
                        }
                    }
                }
            }
            let others = region.len() - 1;
            assert!(others < 64, "region with too many boundaries");
            for (b, bnd) in region.iter().enumerate() {
                if skip_spot(b, 1) {
                    continue;
                }
                let masks = if reduce { self.side_masks(region, b, &spots) } else { (0..1u64 << others).collect() };
                for i in 0..bnd.len() {
                    for j in i..bnd.len() {
                        let (u, v) = (bnd[i], bnd[j]);
                        let legal = if i == j {
                            self.lives(u) >= 2
                        } else {
                            u != v && self.lives(u) > 0 && self.lives(v) > 0
                        };
                        if legal {
                            out.extend(masks.iter().map(|&side| Move::Split { region: r, b, i, j, side }));
                        }
                    }
                }
            }
        }
        out
    }

    /// Side assignments for a split of boundary `b` in which only the number
    /// of isolated spots on each side varies.
    fn side_masks(&self, region: &Region, b: usize, spots: &[usize]) -> Vec<u64> {
        let bit = |k: usize| if k < b { k } else { k - 1 };
        let spot_bits: Vec<usize> = spots.iter().filter(|&&k| k != b).map(|&k| bit(k)).collect();
        let rest_bits: Vec<usize> = (0..region.len()).filter(|&k| k != b && !spots.contains(&k)).map(bit).collect();
        let mut out = Vec::new();
        for count in 0..=spot_bits.len() {
            let spot_mask: u64 = spot_bits[..count].iter().map(|&x| 1u64 << x).sum();
            for sub in 0..1u64 << rest_bits.len() {
                let mut m = spot_mask;
                for (t, &x) in rest_bits.iter().enumerate() {
                    if sub >> t & 1 == 1 {
                        m |= 1 << x;
                    }
                }
                out.push(m);
            }
        }
        out
    }

    fn fresh_vertex(&self) -> u32 {
        let mut used = vec![false; self.degree.len() + 1];
        for &v in self.regions.iter().flatten().flatten() {
            used[v as usize] = true;
        }
        used.iter().position(|&u| !u).unwrap() as u32
    }

    /// Plays `mv`. The result is not simplified.
    pub fn apply(&self, mv: Move) -> SproutsPosition {
        let w = self.fresh_vertex();
        let mut degree = self.degree.clone();
        if degree.len() <= w as usize {
            degree.resize(w as usize + 1, 0);
        }
        let mut regions = self.regions.clone();
        match mv {
            Move::Join { region, a, i, b, j } => {
                let old = regions.swap_remove(region);
                let (ba, bb) = (&old[a], &old[b]);
                let (u, v) = (ba[i], bb[j]);
                let mut merged = rotated(ba, i);
                if self.degree(u) > 0 {
                    merged.push(u);
                }
                merged.push(w);
                merged.extend(rotated(bb, j));
                if self.degree(v) > 0 {
                    merged.push(v);
                }
                merged.push(w);
                let mut nr: Region =
                    old.iter().enumerate().filter(|&(k, _)| k != a && k != b).map(|(_, x)| x.clone()).collect();
                nr.push(merged);
                regions.push(nr);
                degree[u as usize] += 1;
                degree[v as usize] += 1;
            }
            Move::Split { region, b, i, j, side } => {
                let old = regions.swap_remove(region);
                let bnd = &old[b];
                let (u, v) = (bnd[i], bnd[j]);
                let (seg_a, seg_b) = if i == j {
                    if self.degree(u) == 0 {
                        (vec![u, w], vec![u, w])
                    } else {
                        let mut outer = rotated(bnd, i);
                        outer.extend([u, w]);
                        (vec![u, w], outer)
                    }
                } else {
                    let mut sa = bnd[i..=j].to_vec();
                    sa.push(w);
                    let mut sb = bnd[j..].to_vec();
                    sb.extend_from_slice(&bnd[..=i]);
                    sb.push(w);
                    (sa, sb)
                };
                let mut ra: Region = vec![seg_a];
                let mut rb: Region = vec![seg_b];
                for (k, x) in old.iter().enumerate().filter(|&(k, _)| k != b) {
                    let bit = if k < b { k } else { k - 1 };
                    if side >> bit & 1 == 1 {
                        ra.push(x.clone());
                    } else {
                        rb.push(x.clone());
                    }
                }
                regions.push(ra);
                regions.push(rb);
                degree[u as usize] += 1;
                degree[v as usize] += 1;
            }
        }
        degree[w as usize] = 2;
        SproutsPosition { regions, degree }
    }

    fn region_has_move(&self, region: &Region) -> bool {
        let mut first: Option<u32> = None;
        for &v in region.iter().flatten() {
            let l = self.lives(v);
            if l >= 2 {
                return true;
            }
            if l == 1 {
                match first {
                    None => first = Some(v),
                    Some(f) if f != v => return true,
                    _ => {}
                }
            }
        }
        false
    }

    /// Value-preserving reduction: drops dead vertices, empty boundaries and
    /// regions without a move, then renumbers vertices compactly.
    pub fn simplify(&self) -> SproutsPosition {
        let mut regions: Vec<Region> = Vec::new();
        for region in &self.regions {
            let nr: Region = region
                .iter()
                .map(|b| b.iter().copied().filter(|&v| self.lives(v) > 0).collect::<Boundary>())
                .filter(|b| !b.is_empty())
                .collect();
            if !nr.is_empty() && self.region_has_move(&nr) {
                regions.push(nr);
            }
        }
        SproutsPosition { regions, degree: self.degree.clone() }.compacted()
    }

    fn compacted(self) -> SproutsPosition {
        let mut map = vec![u32::MAX; self.degree.len()];
        let mut degree = Vec::new();
        let mut regions = self.regions;
        for v in regions.iter_mut().flatten().flatten() {
            let old = *v as usize;
            if map[old] == u32::MAX {
                map[old] = degree.len() as u32;
                degree.push(self.degree[old]);
            }
            *v = map[old];
        }
        SproutsPosition { regions, degree }
    }

    /// Groups region indices into components linked by shared vertices.
    /// With `live_only`, only vertices with lives link regions.
    fn region_components(&self, live_only: bool) -> Vec<Vec<usize>> {
        let n = self.regions.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        let mut owner: Vec<Option<usize>> = vec![None; self.degree.len()];
        for (ri, region) in self.regions.iter().enumerate() {
            for &v in region.iter().flatten() {
                if live_only && self.lives(v) == 0 {
                    continue;
                }
                match owner[v as usize] {
                    None => owner[v as usize] = Some(ri),
                    Some(o) => {
                        let (a, b) = (find(&mut parent, o), find(&mut parent, ri));
                        parent[a] = b;
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; n];
        for ri in 0..n {
            let root = find(&mut parent, ri);
            if slot[root] == usize::MAX {
                slot[root] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[root]].push(ri);
        }
        groups
    }

    fn subposition(&self, region_ids: &[usize]) -> SproutsPosition {
        let regions = region_ids.iter().map(|&r| self.regions[r].clone()).collect();
        SproutsPosition { regions, degree: self.degree.clone() }.compacted()
    }

    /// Disjoint union; vertex ids of later parts are shifted.
    pub fn union(parts: &[SproutsPosition]) -> SproutsPosition {
        let mut out = SproutsPosition::default();
        for p in parts {
            let base = out.degree.len() as u32;
            out.degree.extend_from_slice(&p.degree);
            out.regions.extend(p.regions.iter().map(|r| r.iter().map(|b| b.iter().map(|v| v + base).collect()).collect()));
        }
        out.compacted()
    }

    /// Applies a vertex relabeling, a rotation to every boundary, optional
    /// reversal per region, and reorders boundaries and regions. Used to
    /// produce equivalent copies in tests.
    pub fn transformed(
        &self,
        relabel: &[u32],
        rotate: impl Fn(usize, usize, usize) -> usize,
        reverse_region: impl Fn(usize) -> bool,
        boundary_order: impl Fn(usize, usize) -> Vec<usize>,
        region_order: &[usize],
    ) -> SproutsPosition {
        let n = self.degree.len();
        let mut degree = vec![0u8; n];
        for v in 0..n {
            degree[relabel[v] as usize] = self.degree[v];
        }
        let mut regions = Vec::new();
        for &ri in region_order {
            let region = &self.regions[ri];
            let order = boundary_order(ri, region.len());
            let mut nr = Vec::new();
            for bi in order {
                let b = &region[bi];
                let mut nb: Boundary = rotated(b, rotate(ri, bi, b.len()) % b.len());
                if reverse_region(ri) {
                    nb.reverse();
                }
                nr.push(nb.into_iter().map(|v| relabel[v as usize]).collect());
            }
            regions.push(nr);
        }
        SproutsPosition { regions, degree }
    }
}

fn rotated(b: &[u32], start: usize) -> Vec<u32> {
    let mut v = b[start..].to_vec();
    v.extend_from_slice(&b[..start]);
    v
}

/// Parses `0*n` or the canonical key grammar.
pub fn parse(text: &str) -> Result<SproutsPosition, ParseError> {
    notation::parse(text)
}

/// Canonical key text.
pub fn render(p: &SproutsPosition) -> String {
    canonical_key(p).to_string()
}

/// All distinct successors, with no reduction applied beyond deduplication.
pub fn moves(p: &SproutsPosition) -> Vec<SproutsPosition> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mv in p.reduced_moves() {
        let q = p.apply(mv);
        if seen.insert(canonical_key(&q)) {
            out.push(q);
        }
    }
    out
}

pub fn simplify(p: &SproutsPosition) -> SproutsPosition {
    p.simplify()
}

/// Atomic components of the simplified position, smallest first (by total
/// lives, then key); components without a move are dropped.
pub fn decompose(p: &SproutsPosition) -> Vec<SproutsPosition> {
    decompose_keyed(p).into_iter().map(|(c, _)| c).collect()
}

fn decompose_keyed(p: &SproutsPosition) -> Vec<(SproutsPosition, Key)> {
    let s = p.simplify();
    let mut parts: Vec<(u32, SproutsPosition, Key)> = s
        .region_components(true)
        .into_iter()
        .map(|ids| {
            let c = s.subposition(&ids);
            let k = canonical_key(&c);
            (c.total_lives(), c, k)
        })
        .collect();
    parts.sort_by(|a, b| (a.0, &a.2).cmp(&(b.0, &b.2)));
    parts.into_iter().map(|(_, c, k)| (c, k)).collect()
}

/// Sprouts under the [`Game`] interface. Children and components are
/// simplified, so keys identify game states.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sprouts;

impl Game for Sprouts {
    type Position = SproutsPosition;

    fn name(&self) -> &'static str {
        "sprouts"
    }

    fn children(&self, p: &SproutsPosition) -> Vec<SproutsPosition> {
        self.children_keyed(p).into_iter().map(|(c, _)| c).collect()
    }

    fn children_keyed(&self, p: &SproutsPosition) -> Vec<(SproutsPosition, Key)> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for mv in p.reduced_moves() {
            let q = p.apply(mv).simplify();
            let k = canonical_key(&q);
            if seen.insert(k.clone()) {
                out.push((q, k));
            }
        }
        out
    }

    fn is_terminal(&self, p: &SproutsPosition) -> bool {
        p.raw_moves().is_empty()
    }

    fn decompose(&self, p: &SproutsPosition) -> Vec<SproutsPosition> {
        decompose(p)
    }

    fn decompose_keyed(&self, p: &SproutsPosition) -> Vec<(SproutsPosition, Key)> {
        decompose_keyed(p)
    }

    fn decompose_known(&self, p: &SproutsPosition, key: &Key) -> Vec<(SproutsPosition, Key)> {
        let body = key.as_str().trim_end_matches('!');
        if body.is_empty() {
            return Vec::new();
        }
        if !body.contains('+') {
            return vec![(p.clone(), key.clone())];
        }
        let mut parts: Vec<(u32, SproutsPosition, Key)> = body
            .split('+')
            .map(|c| {
                let k = Key::from(format!("{c}!"));
                let q = parse(k.as_str()).expect("canonical keys parse");
                (q.total_lives(), q, k)
            })
            .collect();
        parts.sort_by(|a, b| (a.0, &a.2).cmp(&(b.0, &b.2)));
        parts.into_iter().map(|(_, c, k)| (c, k)).collect()
    }

    fn key(&self, p: &SproutsPosition) -> Key {
        canonical_key(p)
    }

    fn parse(&self, text: &str) -> Result<SproutsPosition, ParseError> {
        parse(text)
    }

    fn sum(&self, parts: &[SproutsPosition]) -> SproutsPosition {
        SproutsPosition::union(parts)
    }

    fn empty(&self) -> SproutsPosition {
        SproutsPosition::empty()
    }

    fn heuristic_rank(&self, p: &SproutsPosition) -> u64 {
        p.total_lives() as u64
    }

    fn depth_bound(&self, p: &SproutsPosition) -> usize {
        p.total_lives() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spots_and_empty() {
        assert!(moves(&SproutsPosition::spots(0)).is_empty());
        assert!(Sprouts.is_terminal(&parse("0*0").unwrap()));
        assert_eq!(parse("0*3").unwrap(), SproutsPosition::spots(3));
    }

    #[test]
    fn one_spot_has_a_single_move() {
        let p = SproutsPosition::spots(1);
        let m = moves(&p);
        assert_eq!(m.len(), 1);
        assert_eq!(render(&m[0]), "AB.}AB.}!");
    }

    #[test]
    fn two_spot_moves() {
        // join the spots, or loop around one spot with the other inside or outside
        let m = moves(&SproutsPosition::spots(2));
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn dead_boundary_removed() {
        // a region whose second boundary has only a dead vertex
        let p = SproutsPosition::from_parts(vec![vec![vec![0, 1], vec![2, 2, 2]]], vec![1, 1, 3]).unwrap();
        let s = p.simplify();
        assert_eq!(s.regions().len(), 1);
        assert_eq!(s.regions()[0].len(), 1);
    }

    #[test]
    fn terminal_simplifies_to_empty() {
        let p = SproutsPosition::from_parts(vec![vec![vec![0, 1]], vec![vec![0, 1]]], vec![2, 3]).unwrap();
        assert!(Sprouts.is_terminal(&p.simplify()));
        assert_eq!(render(&p.simplify()), "!");
    }
}
