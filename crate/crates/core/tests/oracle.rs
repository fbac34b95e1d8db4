use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spots_core::oracle::{BudgetExceeded, Oracle, Outcome};
use spots_core::sprouts::moves;
use spots_core::{nim_sum, Nim, Sprouts, SproutsPosition};

#[test]
fn small_boards() {
    let expected = [Outcome::Loss, Outcome::Loss, Outcome::Win, Outcome::Win, Outcome::Win];
    let mut brute = Oracle::new(&Sprouts);
    let mut lazy = Oracle::new(&Sprouts);
    for (i, &want) in expected.iter().enumerate() {
        let p = SproutsPosition::spots(i + 1);
        assert_eq!(brute.brute_outcome(&p).unwrap(), want, "0*{}", i + 1);
        assert_eq!(lazy.couple_outcome(&p, 0).unwrap(), want, "0*{}", i + 1);
    }
    assert_eq!(brute.brute_outcome(&SproutsPosition::spots(0)).unwrap(), Outcome::Loss);
}

#[test]
fn grundy_values_of_small_boards() {
    let mut brute = Oracle::new(&Sprouts);
    let mut lazy = Oracle::new(&Sprouts);
    for n in 0..=5 {
        let want = if n % 6 <= 2 { 0 } else { 1 };
        let p = SproutsPosition::spots(n);
        assert_eq!(brute.brute_grundy(&p).unwrap(), want, "0*{n}");
        assert_eq!(lazy.lazy_grundy(&p).unwrap(), want, "0*{n}");
    }
}

#[test]
fn outcome_is_loss_iff_grundy_is_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut oracle = Oracle::new(&Sprouts);
    oracle.cross_check = true;
    for _ in 0..80 {
        let mut p = SproutsPosition::spots(rng.gen_range(1..=4));
        for _ in 0..rng.gen_range(0..6) {
            let m = moves(&p);
            if m.is_empty() {
                break;
            }
            p = m[rng.gen_range(0..m.len())].clone();
        }
        let g = oracle.brute_grundy(&p).unwrap();
        assert_eq!(oracle.brute_outcome(&p).unwrap(), Outcome::from_win(g != 0));
        for n in 0..3 {
            assert_eq!(oracle.couple_outcome(&p, n).unwrap(), Outcome::from_win(g != n));
        }
    }
}

#[test]
fn nim_sums_cross_check() {
    let mut oracle = Oracle::new(&Nim);
    oracle.cross_check = true;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let p = Nim::position(&[a, b, c]);
                assert_eq!(oracle.brute_grundy(&p).unwrap(), nim_sum([a, b, c]));
                assert_eq!(oracle.brute_outcome(&p).unwrap().is_win(), a ^ b ^ c != 0);
            }
        }
    }
}

#[test]
fn state_budget_is_enforced() {
    let mut oracle = Oracle::with_budget(&Sprouts, 10);
    assert_eq!(oracle.brute_outcome(&SproutsPosition::spots(5)), Err(BudgetExceeded::States(10)));
}

#[test]
fn time_limit_is_enforced() {
    let mut oracle = Oracle::new(&Sprouts).with_time_limit(Duration::ZERO);
    std::thread::sleep(Duration::from_millis(2));
    assert_eq!(oracle.brute_outcome(&SproutsPosition::spots(6)), Err(BudgetExceeded::Time));
}
