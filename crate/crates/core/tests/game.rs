use std::collections::BTreeSet;

use proptest::prelude::*;
use spots_core::oracle::Oracle;
use spots_core::{couple_children, mex, nim_sum, pn_sum, residual_couple, Couple, Game, GameError, Nim, Pn, Sprouts, SproutsPosition};

fn pn_strategy() -> impl Strategy<Value = Pn> {
    prop_oneof![4 => (0u64..1_000_000).prop_map(Pn::new), 1 => Just(Pn::INF), 1 => (u64::MAX / 4..u64::MAX / 2).prop_map(Pn::new)]
}

#[test]
fn examples() {
    assert_eq!(mex([]), 0);
    assert_eq!(mex([0, 1, 3]), 2);
    assert_eq!(mex([1, 2]), 0);
    assert_eq!(nim_sum([1, 2, 3]), 0);
    assert_eq!(nim_sum([]), 0);
    assert_eq!(nim_sum([5, 3]), 6);
    assert_eq!(pn_sum([Pn::new(1); 3]), Pn::new(3));
    assert_eq!(pn_sum([Pn::new(2), Pn::INF]), Pn::INF);
    assert_eq!(pn_sum([]), Pn::new(0));
    assert!(!(Pn::INF < Pn::INF));
}

#[test]
fn couple_children_examples() {
    let kids = couple_children(&Nim, &Couple::new(vec![], 2)).unwrap();
    assert_eq!(kids.iter().map(|c| (c.position.clone(), c.nim)).collect::<Vec<_>>(), vec![(vec![], 0), (vec![], 1)]);
    let kids = couple_children(&Nim, &Couple::new(vec![1], 0)).unwrap();
    assert_eq!(kids.iter().map(|c| (c.position.clone(), c.nim)).collect::<Vec<_>>(), vec![(vec![], 0)]);
    let one = SproutsPosition::spots(1);
    let kids = couple_children(&Sprouts, &Couple::new(one.clone(), 1)).unwrap();
    assert_eq!(kids.len(), Sprouts.children(&one).len() + 1);
    assert!(matches!(couple_children(&Nim, &Couple::new(vec![1, 2], 0)), Err(GameError::DecomposablePosition(2))));
}

#[test]
fn residual_examples() {
    let c = residual_couple(&Nim, &Couple::new(vec![1, 2], 0), &[1]).unwrap();
    assert_eq!((c.position, c.nim), (vec![2], 1));
    let c = residual_couple(&Nim, &Couple::new(vec![3, 4], 3), &[3]).unwrap();
    assert_eq!((c.position, c.nim), (vec![4], 0));
    assert!(matches!(residual_couple(&Nim, &Couple::new(vec![1, 2], 0), &[]), Err(GameError::ArityMismatch { .. })));
    assert!(residual_couple(&Nim, &Couple::new(vec![2], 0), &[]).is_err());
}

#[test]
fn residual_of_two_sprouts_boards() {
    let one = SproutsPosition::spots(1);
    let two = SproutsPosition::spots(2);
    let sum = Sprouts.sum(&[one, two]);
    let parts = Sprouts.decompose(&sum);
    assert_eq!(parts.len(), 2);
    let mut oracle = Oracle::new(&Sprouts);
    let g1 = oracle.brute_grundy(&parts[0]).unwrap();
    let r = residual_couple(&Sprouts, &Couple::new(sum.clone(), 0), &[g1]).unwrap();
    let residual = oracle.couple_outcome(&r.position, r.nim).unwrap();
    assert_eq!(residual, oracle.brute_outcome(&sum).unwrap());
}

/// Grundy value by exhaustive recursion on the heap list.
fn nim_grundy(heaps: &[u32]) -> u32 {
    let mut seen = BTreeSet::new();
    for i in 0..heaps.len() {
        for take in 1..=heaps[i] {
            let mut h = heaps.to_vec();
            h[i] -= take;
            seen.insert(nim_grundy(&h));
        }
    }
    (0..).find(|g| !seen.contains(g)).unwrap()
}

proptest! {
    #[test]
    fn mex_is_least_missing(values in proptest::collection::btree_set(0u32..20, 0..15)) {
        let m = mex(values.iter().copied());
        prop_assert!(!values.contains(&m));
        for k in 0..m {
            prop_assert!(values.contains(&k));
        }
    }

    #[test]
    fn pn_sum_laws(a in pn_strategy(), b in pn_strategy(), c in pn_strategy()) {
        prop_assert_eq!(pn_sum([a, pn_sum([b, c])]), pn_sum([pn_sum([a, b]), c]));
        prop_assert_eq!(pn_sum([a, b]), pn_sum([b, a]));
        prop_assert_eq!(pn_sum([a, Pn::INF]), Pn::INF);
        prop_assert!(pn_sum([a, b]) >= a.max(b));
    }

    #[test]
    fn nim_grundy_is_xor(heaps in proptest::collection::vec(0u32..5, 0..4)) {
        let mut oracle = Oracle::new(&Nim);
        let pos = Nim::position(&heaps);
        prop_assert_eq!(oracle.brute_grundy(&pos).unwrap(), nim_sum(heaps.iter().copied()));
        prop_assert_eq!(nim_grundy(&heaps), nim_sum(heaps.iter().copied()));
    }

    #[test]
    fn couple_children_count(heaps in proptest::collection::vec(0u32..6, 0..2), n in 0u32..6) {
        let pos = Nim::position(&heaps);
        let kids = couple_children(&Nim, &Couple::new(pos.clone(), n)).unwrap();
        prop_assert_eq!(kids.len(), Nim.children(&pos).len() + n as usize);
    }
}

#[test]
fn sum_is_lost_iff_values_cancel() {
    let mut oracle = Oracle::new(&Sprouts);
    let mut nim = Oracle::new(&Nim);
    for a in 0..4 {
        for b in 0..4 {
            let (p, q) = (SproutsPosition::spots(a), SproutsPosition::spots(b));
            let gp = oracle.brute_grundy(&p).unwrap();
            let gq = oracle.brute_grundy(&q).unwrap();
            let sum = Sprouts.sum(&[p.clone(), q]);
            assert_eq!(oracle.brute_outcome(&sum).unwrap().is_win(), gp ^ gq != 0, "0*{a} + 0*{b}");
            for heap in 0..5 {
                assert_eq!(oracle.couple_outcome(&p, heap).unwrap().is_win(), gp != heap);
                let mixed = Nim.sum(&[Nim::position(&[heap]), Nim::position(&[gp])]);
                assert_eq!(nim.brute_outcome(&mixed).unwrap().is_win(), gp != heap);
            }
        }
    }
}
