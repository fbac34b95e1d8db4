use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spots_core::oracle::Oracle;
use spots_core::sprouts::{canonical_key, decompose, moves, parse, render, simplify, Region};
use spots_core::{Game, Key, Sprouts, SproutsPosition};

/// Every successor obtained by drawing a curve between any two corners with
/// enough lives, with every split of the other boundaries between the two
/// sides. Written directly against the region/boundary lists.
fn naive_successors(p: &SproutsPosition) -> Vec<SproutsPosition> {
    let verts = p.vertices();
    let n = verts.iter().map(|&v| v as usize + 1).max().unwrap_or(0);
    let deg: Vec<u8> = (0..n as u32).map(|v| if verts.contains(&v) { p.degree(v) } else { 3 }).collect();
    let w = n as u32;
    let mut out = Vec::new();
    let regions = p.regions();
    for (r, region) in regions.iter().enumerate() {
        let rest: Vec<Region> = regions.iter().enumerate().filter(|&(k, _)| k != r).map(|(_, x)| x.clone()).collect();
        let finish = |new_regions: Vec<Region>, ends: &[u32]| {
            let mut d = deg.clone();
            d.push(2);
            for &e in ends {
                d[e as usize] += 1;
            }
            let mut all = rest.clone();
            all.extend(new_regions);
            SproutsPosition::from_parts(all, d).expect("successor is valid")
        };
        // curves between two boundaries
        for a in 0..region.len() {
            for b in 0..region.len() {
                if a == b {
                    continue;
                }
                for i in 0..region[a].len() {
                    for j in 0..region[b].len() {
                        let (u, v) = (region[a][i], region[b][j]);
                        if deg[u as usize] == 3 || deg[v as usize] == 3 {
                            continue;
                        }
                        let mut walk: Vec<u32> = Vec::new();
                        let la = region[a].len();
                        walk.extend((0..la).map(|k| region[a][(i + k) % la]));
                        if deg[u as usize] > 0 {
                            walk.push(u);
                        }
                        walk.push(w);
                        let lb = region[b].len();
                        walk.extend((0..lb).map(|k| region[b][(j + k) % lb]));
                        if deg[v as usize] > 0 {
                            walk.push(v);
                        }
                        walk.push(w);
                        let mut nr: Region = region.iter().enumerate().filter(|&(k, _)| k != a && k != b).map(|(_, x)| x.clone()).collect();
                        nr.push(walk);
                        out.push(finish(vec![nr], &[u, v]));
                    }
                }
            }
        }
        // curves from a boundary back to itself
        for b in 0..region.len() {
            let bnd = &region[b];
            let len = bnd.len();
            let others: Vec<usize> = (0..region.len()).filter(|&k| k != b).collect();
            for i in 0..len {
                for j in 0..len {
                    let (u, v) = (bnd[i], bnd[j]);
                    let lives = |x: u32| 3 - deg[x as usize];
                    let (inner, outer) = if i == j {
                        if lives(u) < 2 {
                            continue;
                        }
                        if deg[u as usize] == 0 {
                            (vec![u, w], vec![u, w])
                        } else {
                            let mut o: Vec<u32> = (0..len).map(|k| bnd[(i + k) % len]).collect();
                            o.extend([u, w]);
                            (vec![u, w], o)
                        }
                    } else {
                        if u == v || lives(u) == 0 || lives(v) == 0 {
                            continue;
                        }
                        let steps = (j + len - i) % len;
                        let mut a: Vec<u32> = (0..=steps).map(|k| bnd[(i + k) % len]).collect();
                        a.push(w);
                        let mut c: Vec<u32> = (0..=len - steps).map(|k| bnd[(j + k) % len]).collect();
                        c.push(w);
                        (a, c)
                    };
                    for mask in 0..1u32 << others.len() {
                        let mut ra: Region = vec![inner.clone()];
                        let mut rb: Region = vec![outer.clone()];
                        for (t, &k) in others.iter().enumerate() {
                            if mask >> t & 1 == 1 {
                                ra.push(region[k].clone());
                            } else {
                                rb.push(region[k].clone());
                            }
                        }
                        out.push(finish(vec![ra, rb], &[u, v]));
                    }
                }
            }
        }
    }
    out
}

fn key_set(ps: &[SproutsPosition]) -> BTreeSet<Key> {
    ps.iter().map(canonical_key).collect()
}

/// Plays `steps` random moves from `0*n`, stopping early at a terminal position.
fn random_position(n: usize, steps: usize, seed: u64) -> SproutsPosition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = SproutsPosition::spots(n);
    for _ in 0..steps {
        let m = moves(&p);
        if m.is_empty() {
            break;
        }
        p = m[rng.gen_range(0..m.len())].clone();
    }
    p
}

fn scrambled(p: &SproutsPosition, seed: u64) -> SproutsPosition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.vertices().iter().map(|&v| v as usize + 1).max().unwrap_or(0);
    let mut relabel: Vec<u32> = (0..n as u32).collect();
    relabel.shuffle(&mut rng);
    let rots: Vec<Vec<usize>> = p.regions().iter().map(|r| r.iter().map(|_| rng.gen_range(0..64)).collect()).collect();
    let rev: Vec<bool> = p.regions().iter().map(|_| rng.gen()).collect();
    let orders: Vec<Vec<usize>> = p
        .regions()
        .iter()
        .map(|r| {
            let mut o: Vec<usize> = (0..r.len()).collect();
            o.shuffle(&mut rng);
            o
        })
        .collect();
    let mut region_order: Vec<usize> = (0..p.regions().len()).collect();
    region_order.shuffle(&mut rng);
    p.transformed(&relabel, |r, b, _| rots[r][b], |r| rev[r], |r, _| orders[r].clone(), &region_order)
}

#[test]
fn naive_generator_agrees_on_small_boards() {
    for n in 0..=5 {
        let p = SproutsPosition::spots(n);
        assert_eq!(key_set(&naive_successors(&p)), key_set(&moves(&p)), "0*{n}");
    }
}

#[test]
fn naive_generator_agrees_along_playouts() {
    for seed in 0..150 {
        let n = 2 + (seed % 4) as usize;
        let p = random_position(n, (seed % 7) as usize, seed);
        assert_eq!(key_set(&naive_successors(&p)), key_set(&moves(&p)), "{}", render(&p));
    }
}

#[test]
fn initial_positions_have_moves() {
    for n in 1..=12 {
        assert!(!moves(&SproutsPosition::spots(n)).is_empty());
    }
    assert!(moves(&SproutsPosition::spots(0)).is_empty());
}

#[test]
fn parse_render_round_trip() {
    assert_eq!(render(&parse("0*5").unwrap()), render(&SproutsPosition::spots(5)));
    assert_eq!(render(&parse("0*0").unwrap()), "!");
    for seed in 0..100 {
        let p = random_position(4, (seed % 8) as usize, seed);
        let text = render(&p);
        assert_eq!(render(&parse(&text).unwrap()), text);
    }
    let err = parse("0*x").unwrap_err();
    assert_eq!(err.offset, 2);
}

#[test]
fn distinct_boards_get_distinct_keys() {
    let keys: BTreeSet<Key> = (0..8).map(|n| canonical_key(&SproutsPosition::spots(n))).collect();
    assert_eq!(keys.len(), 8);
}

#[test]
fn exhaustive_playouts_stay_within_bound() {
    fn longest(p: &SproutsPosition) -> usize {
        moves(p).iter().map(|c| 1 + longest(c)).max().unwrap_or(0)
    }
    for n in 1..=3 {
        let l = longest(&SproutsPosition::spots(n));
        assert!(l <= 3 * n - 1, "0*{n}: {l} moves");
        assert!(l >= 2 * n, "0*{n}: {l} moves");
    }
}

#[test]
fn two_separate_spots_decompose() {
    // one-spot boards in two regions that share no vertex
    let a = SproutsPosition::spots(1);
    let sum = Sprouts.sum(&[a.clone(), a]);
    assert_eq!(decompose(&sum).len(), 2);
    assert_eq!(decompose(&SproutsPosition::spots(4)).len(), 1);
    assert!(decompose(&SproutsPosition::empty()).is_empty());
}

#[test]
fn terminal_position_simplifies_to_empty() {
    let mut p = SproutsPosition::spots(2);
    loop {
        let m = moves(&p);
        if m.is_empty() {
            break;
        }
        p = m[0].clone();
    }
    assert!(Sprouts.is_terminal(&p));
    assert_eq!(render(&simplify(&p)), "!");
}

#[test]
fn components_preserve_outcome_and_value() {
    let mut oracle = Oracle::new(&Sprouts);
    for seed in 0..60 {
        let p = random_position(4, 2 + (seed % 5) as usize, 1000 + seed);
        let direct = oracle.brute_grundy(&p).unwrap();
        let parts = decompose(&p);
        let xor = parts.iter().fold(0, |acc, c| acc ^ oracle.brute_grundy(c).unwrap());
        assert_eq!(direct, xor, "{}", render(&p));
        let simple = oracle.brute_grundy(&simplify(&p)).unwrap();
        assert_eq!(direct, simple, "{}", render(&p));
        assert_eq!(oracle.brute_outcome(&p).unwrap().is_win(), direct != 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn keys_ignore_relabeling_and_rotation(seed in any::<u64>(), n in 1usize..6, steps in 0usize..10) {
        let p = random_position(n, steps, seed);
        let key = canonical_key(&p);
        for k in 0..16u64 {
            let q = scrambled(&p, seed ^ k.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            prop_assert_eq!(&canonical_key(&q), &key);
        }
    }

    #[test]
    fn successors_are_valid(seed in any::<u64>(), n in 1usize..6, steps in 0usize..10) {
        let p = random_position(n, steps, seed);
        let before = p.vertices().len();
        for c in moves(&p) {
            prop_assert!(c.validate().is_ok());
            prop_assert_eq!(c.vertices().len(), before + 1);
            prop_assert_eq!(c.total_lives() + 1, p.total_lives());
        }
    }

    #[test]
    fn playouts_end_within_bound(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = SproutsPosition::spots(n);
        let mut len = 0;
        loop {
            let m = Sprouts.children(&p);
            if m.is_empty() {
                break;
            }
            p = m[rng.gen_range(0..m.len())].clone();
            len += 1;
        }
        prop_assert!(len <= 3 * n - 1);
        prop_assert!(len >= 2 * n);
    }
}

#[test]
fn thousand_scrambles_share_one_key() {
    let p = random_position(5, 4, 77);
    let key = canonical_key(&p);
    for s in 0..1000 {
        assert_eq!(canonical_key(&scrambled(&p, s)), key);
    }
}
