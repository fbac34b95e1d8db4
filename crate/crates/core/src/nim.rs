//! Nim: the reference game whose values are known in closed form.

use crate::game::{Game, Key, ParseError};

/// Nim with any number of heaps. Positions are heap sizes, sorted ascending,
/// without empty heaps.
#[derive(Clone, Copy, Debug, Default)]
pub struct Nim;

impl Nim {
    pub fn position(heaps: &[u32]) -> Vec<u32> {
        let mut v: Vec<u32> = heaps.iter().copied().filter(|&h| h > 0).collect();
        v.sort_unstable();
        v
    }
}

impl Game for Nim {
    type Position = Vec<u32>;

    fn name(&self) -> &'static str {
        "nim"
    }

    fn children(&self, p: &Vec<u32>) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        for (i, &h) in p.iter().enumerate() {
            if i > 0 && p[i - 1] == h {
                continue;
            }
            for smaller in 0..h {
                let mut q = p.clone();
                q[i] = smaller;
                out.push(Nim::position(&q));
            }
        }
        out
    }

    fn is_terminal(&self, p: &Vec<u32>) -> bool {
        p.is_empty()
    }

    fn decompose(&self, p: &Vec<u32>) -> Vec<Vec<u32>> {
        Nim::position(p).into_iter().map(|h| vec![h]).collect()
    }

    fn key(&self, p: &Vec<u32>) -> Key {
        let p = Nim::position(p);
        if p.is_empty() {
            return Key::from("0");
        }
        let parts: Vec<String> = p.iter().map(|h| h.to_string()).collect();
        Key::from(parts.join(","))
    }

    /// Comma-separated heap sizes, e.g. `1,2,3`; `0` is the empty position.
    fn parse(&self, text: &str) -> Result<Vec<u32>, ParseError> {
        let mut heaps = Vec::new();
        let mut offset = 0;
        for part in text.split(',') {
            let t = part.trim();
            let h = t
                .parse::<u32>()
                .map_err(|_| ParseError::new(offset, format!("bad heap size {t:?}")))?;
            heaps.push(h);
            offset += part.len() + 1;
        }
        Ok(Nim::position(&heaps))
    }

    fn sum(&self, parts: &[Vec<u32>]) -> Vec<u32> {
        Nim::position(&parts.concat())
    }

    fn empty(&self) -> Vec<u32> {
        Vec::new()
    }

    fn heuristic_rank(&self, p: &Vec<u32>) -> u64 {
        p.iter().map(|&h| h as u64).sum()
    }

    fn depth_bound(&self, p: &Vec<u32>) -> usize {
        p.iter().map(|&h| h as usize).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn children_of_small_positions() {
        assert_eq!(Nim.children(&vec![2]), vec![vec![], vec![1]]);
        assert_eq!(Nim.children(&vec![1, 1]), vec![vec![1]]);
        assert_eq!(Nim.children(&vec![1, 2]).len(), 3);
    }

    #[test]
    fn parse_and_render() {
        let p = Nim.parse("3, 1,2,0").unwrap();
        assert_eq!(p, vec![1, 2, 3]);
        assert_eq!(Nim.render(&p), "1,2,3");
        assert_eq!(Nim.render(&Nim.parse("0").unwrap()), "0");
        assert_eq!(Nim.parse("1,x").unwrap_err().offset, 2);
    }
}
