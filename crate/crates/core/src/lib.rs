//! Impartial game primitives shared by every solver in the workspace.
//!
//! The crate holds the game abstraction ([`Game`]), proof-number arithmetic,
//! Sprouts, Nim and small table-driven games, a memoized brute-force oracle,
//! the Grundy certificate format, and the sampling and verification tools.

pub mod analysis;
pub mod cert;
pub mod game;
pub mod nim;
pub mod num;
pub mod oracle;
pub mod sprouts;
pub mod table;

pub use game::{couple_children, residual_couple, Couple, Game, GameError, Key, ParseError, Shape};
pub use nim::Nim;
pub use num::{mex, nim_sum, pn_sum, Numbers, Pn};
pub use sprouts::{Sprouts, SproutsPosition};
pub use table::TableGame;
