//! Tree-size estimation by random sampling, and certificate checking.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cert::{self, FormatError};
use crate::game::{Game, Key};

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexityEstimate {
    pub mean: f64,
    /// Standard deviation for plain estimates, 1st to 99th percentile range
    /// for Grundy-aware ones.
    pub dispersion: f64,
    pub samples: usize,
}

/// Knuth's estimator: the product of branching factors along uniformly
/// random playouts, averaged.
pub fn estimate_plain<G: Game>(game: &G, root: &G::Position, samples: usize, seed: u64) -> ComplexityEstimate {
    assert!(samples >= 1, "at least one sample");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..samples)
        .map(|_| {
            let mut p = root.clone();
            let mut product = 1.0;
            loop {
                let mut kids = game.children(&p);
                if kids.is_empty() {
                    break product;
                }
                product *= kids.len() as f64;
                p = kids.swap_remove(rng.gen_range(0..kids.len()));
            }
        })
        .collect();
    let mean = values.iter().sum::<f64>() / samples as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / samples as f64;
    ComplexityEstimate { mean, dispersion: var.sqrt(), samples }
}

/// Size estimate of the tree searched with Grundy numbers. Couples are
/// sampled from `root + *0`: one random child at atomic couples, every child
/// at sums. A sum's non-residual components count `expected_gn + 1` couples
/// `Q + *j`, the residual keeps the sum's heap.
pub fn estimate_gn<G: Game>(
    game: &G,
    root: &G::Position,
    samples: usize,
    seed: u64,
    expected_gn: u32,
) -> ComplexityEstimate {
    assert!(samples >= 1, "at least one sample");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let root = game.decompose_keyed(root);
    let mut values: Vec<f64> = (0..samples).map(|_| sample_couple(game, &root, 0, expected_gn, &mut rng)).collect();
    let mean = values.iter().sum::<f64>() / samples as f64;
    values.sort_by(f64::total_cmp);
    let pct = |q: f64| values[((q * samples as f64).ceil() as usize).clamp(1, samples) - 1];
    ComplexityEstimate { mean, dispersion: pct(0.99) - pct(0.01), samples }
}

fn sample_couple<G: Game, R: Rng>(game: &G, parts: &[(G::Position, Key)], nim: u32, e: u32, rng: &mut R) -> f64 {
    match parts {
        [] if nim == 0 => 1.0,
        [] => nim as f64 * sample_couple(game, parts, rng.gen_range(0..nim), e, rng),
        [(q, _)] => {
            let mut kids = game.children_keyed(q);
            let b = kids.len() + nim as usize;
            if b == 0 {
                return 1.0;
            }
            let i = rng.gen_range(0..b);
            let c = if i < kids.len() {
                let (c, k) = kids.swap_remove(i);
                sample_couple(game, &game.decompose_known(&c, &k), nim, e, rng)
            } else {
                sample_couple(game, &parts[..1], (i - kids.len()) as u32, e, rng)
            };
            b as f64 * c
        }
        [rest @ .., last] => {
            let mut total = sample_couple(game, std::slice::from_ref(last), nim, e, rng);
            for part in rest {
                for j in 0..=e {
                    total += sample_couple(game, std::slice::from_ref(part), j, e, rng);
                }
            }
            total
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CertificateReport {
    pub checked: usize,
    pub failures: Vec<(Key, String)>,
    /// Components whose value the certificate does not give.
    pub missing_dependencies: Vec<Key>,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks every entry `(P, g)` against the mex rule: no child of `P` may
/// have value `g`, and every `m < g` must be the value of some child. Child
/// values come from the certificate by xor over components. A child whose
/// value cannot be derived is listed as a missing dependency; it cannot
/// witness a value below `g`, and it is not held against the entry.
pub fn verify_certificate<G: Game>(game: &G, entries: &BTreeMap<Key, u32>) -> CertificateReport {
    let mut report = CertificateReport::default();
    let mut missing = BTreeSet::new();
    for (key, &g) in entries {
        report.checked += 1;
        if let Err(why) = check_entry(game, entries, key, g, &mut missing) {
            report.failures.push((key.clone(), why));
        }
    }
    report.missing_dependencies = missing.into_iter().collect();
    report
}

/// The mex check of a single entry against the values in `entries`.
/// Children whose value cannot be derived are added to `missing`.
pub fn check_entry<G: Game>(
    game: &G,
    entries: &BTreeMap<Key, u32>,
    key: &Key,
    g: u32,
    missing: &mut BTreeSet<Key>,
) -> Result<(), String> {
    let p = game.parse(key.as_str()).map_err(|e| format!("unparsable key: {e}"))?;
    let parts = game.decompose_known(&p, key);
    if parts.len() != 1 || &parts[0].1 != key {
        return Err("entry is not a reduced atomic position".into());
    }
    let mut seen = BTreeSet::new();
    for (c, k) in game.children_keyed(&p) {
        let mut value = Some(0);
        for (_, ck) in game.decompose_known(&c, &k) {
            match entries.get(&ck) {
                Some(v) => value = value.map(|x| x ^ v),
                None => {
                    missing.insert(ck);
                    value = None;
                }
            }
        }
        if let Some(v) = value {
            if v == g {
                return Err(format!("child {k} also has value {g}"));
            }
            seen.insert(v);
        }
    }
    match (0..g).find(|m| !seen.contains(m)) {
        Some(m) => Err(format!("no child with value {m}")),
        None => Ok(()),
    }
}

pub fn verify_file<G: Game>(game: &G, path: &std::path::Path) -> Result<CertificateReport, FormatError> {
    Ok(verify_certificate(game, &cert::load(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nim::Nim;
    use crate::table::TableGame;

    #[test]
    fn regular_trees_are_exact() {
        for (b, d) in [(2, 5), (3, 4), (1, 7), (5, 1)] {
            let g = TableGame::regular(b, d);
            let e = estimate_plain(&g, &g.top(), 50, 7);
            assert_eq!(e.mean, (b as f64).powi(d as i32));
            assert_eq!(e.dispersion, 0.0);
        }
    }

    #[test]
    fn single_path() {
        let g = TableGame::new(vec![vec![], vec![vec![0]], vec![vec![1]]]).unwrap();
        let e = estimate_plain(&g, &g.top(), 10, 1);
        assert_eq!((e.mean, e.dispersion), (1.0, 0.0));
    }

    #[test]
    fn sums_add_instead_of_multiplying() {
        let g = TableGame::regular(2, 4);
        let root = g.sum(&[g.top(), g.top()]);
        let e = estimate_gn(&g, &root, 20, 3, 0);
        assert_eq!(e.mean, 2.0 * 16.0);
        assert_eq!(e.dispersion, 0.0);
        assert!(estimate_plain(&g, &root, 20, 3).mean > e.mean);
    }

    #[test]
    fn atomic_games_estimate_alike() {
        let g = TableGame::regular(3, 3);
        let root = g.top();
        assert_eq!(estimate_gn(&g, &root, 30, 9, 1).mean, estimate_plain(&g, &root, 30, 9).mean);
    }

    #[test]
    fn deterministic_by_seed() {
        let p = Nim::position(&[3, 2]);
        assert_eq!(estimate_plain(&Nim, &p, 100, 5), estimate_plain(&Nim, &p, 100, 5));
        assert_eq!(estimate_gn(&Nim, &p, 100, 5, 2), estimate_gn(&Nim, &p, 100, 5, 2));
    }

    #[test]
    fn nim_certificate() {
        let entries: BTreeMap<Key, u32> = (1..6).map(|h| (Key::from(h.to_string()), h)).collect();
        let r = verify_certificate(&Nim, &entries);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.checked, 5);
        for h in 1..6u32 {
            for v in [h - 1, h + 1] {
                let mut bad = entries.clone();
                bad.insert(Key::from(h.to_string()), v);
                assert!(!verify_certificate(&Nim, &bad).passed(), "heap {h} as {v}");
            }
        }
    }

    #[test]
    fn empty_certificate_passes() {
        let r = verify_certificate(&Nim, &BTreeMap::new());
        assert!(r.passed());
        assert_eq!(r.checked, 0);
    }

    #[test]
    fn missing_values_are_reported() {
        let entries: BTreeMap<Key, u32> = [(Key::from("3"), 3)].into();
        let r = verify_certificate(&Nim, &entries);
        assert!(!r.passed());
        assert_eq!(r.missing_dependencies, vec![Key::from("1"), Key::from("2")]);
    }
}
