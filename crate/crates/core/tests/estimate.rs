use spots_core::analysis::{estimate_gn, estimate_plain};
use spots_core::{Game, Nim, Sprouts, SproutsPosition, TableGame};

/// Number of root-to-leaf paths, which is what the plain estimator targets.
fn leaf_paths<G: Game>(game: &G, p: &G::Position) -> f64 {
    let kids = game.children(p);
    if kids.is_empty() {
        return 1.0;
    }
    kids.iter().map(|c| leaf_paths(game, c)).sum()
}

/// Leaf paths of the couple tree `parts + *nim`, with sums counted as the
/// total of their component trees.
fn couple_paths<G: Game>(game: &G, parts: &[G::Position], nim: u32, e: u32) -> f64 {
    match parts {
        [] if nim == 0 => 1.0,
        [] => (0..nim).map(|m| couple_paths(game, parts, m, e)).sum(),
        [q] => {
            let kids = game.children(q);
            if kids.is_empty() && nim == 0 {
                return 1.0;
            }
            let moves: f64 = kids.iter().map(|c| couple_paths(game, &game.decompose(c), nim, e)).sum();
            moves + (0..nim).map(|m| couple_paths(game, parts, m, e)).sum::<f64>()
        }
        [rest @ .., last] => {
            let mut total = couple_paths(game, std::slice::from_ref(last), nim, e);
            for part in rest {
                total += (0..=e).map(|j| couple_paths(game, std::slice::from_ref(part), j, e)).sum::<f64>();
            }
            total
        }
    }
}

fn mean_and_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn plain_estimate_is_unbiased_on_two_spots() {
    let root = SproutsPosition::spots(2);
    let exact = leaf_paths(&Sprouts, &root);
    let e = estimate_plain(&Sprouts, &root, 10_000, 11);
    let se = e.dispersion / (e.samples as f64).sqrt();
    assert!((e.mean - exact).abs() <= 3.0 * se + 1e-9, "mean {} exact {exact} se {se}", e.mean);
}

#[test]
fn gn_estimate_is_unbiased_on_a_sum() {
    let root = Sprouts.sum(&[SproutsPosition::spots(1), SproutsPosition::spots(2)]);
    let parts = Sprouts.decompose(&root);
    assert_eq!(parts.len(), 2);
    let exact = couple_paths(&Sprouts, &parts, 0, 1);
    let xs: Vec<f64> = (0..4000).map(|s| estimate_gn(&Sprouts, &root, 1, s, 1).mean).collect();
    let (mean, se) = mean_and_error(&xs);
    assert!((mean - exact).abs() <= 3.0 * se + 1e-9, "mean {mean} exact {exact} se {se}");
}

#[test]
fn single_sample_has_no_spread() {
    let root = Nim::position(&[2, 3]);
    assert_eq!(estimate_plain(&Nim, &root, 1, 4).dispersion, 0.0);
    assert_eq!(estimate_gn(&Nim, &root, 1, 4, 2).dispersion, 0.0);
}

#[test]
fn regular_trees() {
    for (b, d) in [(2u32, 6u32), (4, 3), (3, 5)] {
        let g = TableGame::regular(b, d);
        let e = estimate_plain(&g, &g.top(), 25, 2);
        assert_eq!(e.mean, (b as f64).powi(d as i32));
        let sum = g.sum(&[g.top(), g.top(), g.top()]);
        assert_eq!(estimate_gn(&g, &sum, 25, 2, 0).mean, 3.0 * (b as f64).powi(d as i32));
    }
}
