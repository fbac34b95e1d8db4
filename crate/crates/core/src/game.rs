//! The impartial-game abstraction and couples `P + *n`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::num::nim_sum;

/// Canonical text key of a position. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Key(Arc<str>);

impl Key {
    pub fn new(s: impl Into<Arc<str>>) -> Key {
        Key(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl From<&str> for Key {
    fn from(s: &str) -> Key {
        Key::new(s)
    }
}

impl From<String> for Key {
    fn from(s: String) -> Key {
        Key::new(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: {reason}")]
pub struct ParseError {
    pub offset: usize,
    pub reason: String,
}

impl ParseError {
    pub fn new(offset: usize, reason: impl Into<String>) -> ParseError {
        ParseError { offset, reason: reason.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("position decomposes into {0} components")]
    DecomposablePosition(usize),
    #[error("expected {expected} Grundy values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
}

/// An impartial game under normal play.
///
/// Positions handed out by `children` and `decompose` are expected to be in
/// the game's reduced form, so that `key` identifies the game state.
pub trait Game: Send + Sync + 'static {
    type Position: Clone + fmt::Debug + Send + Sync + 'static;

    fn name(&self) -> &'static str;

    /// Successor positions, one per distinct state.
    fn children(&self, p: &Self::Position) -> Vec<Self::Position>;

    fn is_terminal(&self, p: &Self::Position) -> bool {
        self.children(p).is_empty()
    }

    /// Independent components, each atomic and non-empty. A terminal position
    /// yields no components; an atomic one yields itself.
    fn decompose(&self, p: &Self::Position) -> Vec<Self::Position>;

    fn key(&self, p: &Self::Position) -> Key;

    fn parse(&self, text: &str) -> Result<Self::Position, ParseError>;

    fn render(&self, p: &Self::Position) -> String {
        self.key(p).to_string()
    }

    /// Disjoint sum of positions.
    fn sum(&self, parts: &[Self::Position]) -> Self::Position;

    fn empty(&self) -> Self::Position;

    /// Ordinal used by the child-ordering heuristic; smaller is tried first.
    fn heuristic_rank(&self, _p: &Self::Position) -> u64 {
        0
    }

    /// Upper bound on the number of moves left, used for depth assertions.
    fn depth_bound(&self, _p: &Self::Position) -> usize {
        usize::MAX
    }

    fn children_keyed(&self, p: &Self::Position) -> Vec<(Self::Position, Key)> {
        self.children(p)
            .into_iter()
            .map(|c| {
                let k = self.key(&c);
                (c, k)
            })
            .collect()
    }

    fn decompose_keyed(&self, p: &Self::Position) -> Vec<(Self::Position, Key)> {
        self.decompose(p)
            .into_iter()
            .map(|c| {
                let k = self.key(&c);
                (c, k)
            })
            .collect()
    }

    /// `decompose_keyed` for a reduced position whose key is already known.
    fn decompose_known(&self, p: &Self::Position, _key: &Key) -> Vec<(Self::Position, Key)> {
        self.decompose_keyed(p)
    }
}

/// A position paired with a single Nim heap, `P + *n`.
#[derive(Clone, Debug)]
pub struct Couple<P> {
    pub position: P,
    pub nim: u32,
}

impl<P> Couple<P> {
    pub fn new(position: P, nim: u32) -> Couple<P> {
        Couple { position, nim }
    }
}

/// How a couple is searched.
#[derive(Clone, Debug)]
pub enum Shape<P> {
    /// The empty position with an empty heap.
    Terminal,
    /// The position is atomic or empty; the payload is its reduced form.
    Atomic(P, Key),
    /// Two or more components; the last one becomes the residual.
    Decomposable(Vec<(P, Key)>),
}

impl<P> Shape<P> {
    pub fn of<G: Game<Position = P>>(game: &G, position: &P, nim: u32) -> Shape<P> {
        let mut parts = game.decompose_keyed(position);
        match parts.len() {
            0 if nim == 0 => Shape::Terminal,
            0 => {
                let e = game.empty();
                let k = game.key(&e);
                Shape::Atomic(e, k)
            }
            1 => {
                let (p, k) = parts.pop().unwrap();
                Shape::Atomic(p, k)
            }
            _ => Shape::Decomposable(parts),
        }
    }
}

/// Children of an atomic couple: game moves first, then heap reductions.
pub fn couple_children<G: Game>(game: &G, c: &Couple<G::Position>) -> Result<Vec<Couple<G::Position>>, GameError> {
    let parts = game.decompose(&c.position).len();
    if parts > 1 {
        return Err(GameError::DecomposablePosition(parts));
    }
    let mut out: Vec<Couple<G::Position>> =
        game.children(&c.position).into_iter().map(|p| Couple::new(p, c.nim)).collect();
    out.extend((0..c.nim).map(|m| Couple::new(c.position.clone(), m)));
    Ok(out)
}

/// `P_k + *(n ^ gn(P_1) ^ ... ^ gn(P_{k-1}))` for a decomposable couple.
pub fn residual_couple<G: Game>(
    game: &G,
    c: &Couple<G::Position>,
    grundy_values: &[u32],
) -> Result<Couple<G::Position>, GameError> {
    let mut parts = game.decompose(&c.position);
    if parts.len() < 2 {
        return Err(GameError::DecomposablePosition(parts.len()));
    }
    if grundy_values.len() != parts.len() - 1 {
        return Err(GameError::ArityMismatch { expected: parts.len() - 1, got: grundy_values.len() });
    }
    let last = parts.pop().unwrap();
    Ok(Couple::new(last, c.nim ^ nim_sum(grundy_values.iter().copied())))
}
