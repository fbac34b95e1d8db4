#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spots_core::oracle::Oracle;
use spots_core::{Game, Key, Nim, Sprouts, SproutsPosition};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Up to `heaps` heaps of size at most `max`.
pub fn random_nim(rng: &mut ChaCha8Rng, heaps: usize, max: u32) -> Vec<u32> {
    let k = rng.gen_range(1..=heaps);
    Nim::position(&(0..k).map(|_| rng.gen_range(0..=max)).collect::<Vec<_>>())
}

/// A position reached by a random playout from a few spots.
pub fn random_sprouts(rng: &mut ChaCha8Rng) -> SproutsPosition {
    let n = rng.gen_range(2..=5);
    let mut p = SproutsPosition::spots(n);
    let depth = rng.gen_range(0..=n + 2);
    for _ in 0..depth {
        let mut kids = Sprouts.children(&p);
        if kids.is_empty() {
            break;
        }
        p = kids.swap_remove(rng.gen_range(0..kids.len()));
    }
    p
}

/// Every recorded Grundy value matches the oracle.
pub fn check_db<G: Game>(game: &G, oracle: &mut Oracle<'_, G>, entries: impl IntoIterator<Item = (Key, u32)>) {
    for (k, g) in entries {
        let p = game.parse(k.as_str()).expect("keys parse");
        assert_eq!(oracle.lazy_grundy(&p).unwrap(), g, "Grundy value of {k}");
    }
}
