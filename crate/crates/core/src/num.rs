//! Proof numbers over the naturals extended with infinity, plus nimber helpers.

use std::fmt;
use std::ops::{Add, Sub};
use std::str::FromStr;

/// A proof or disproof number.
///
/// Infinity is a sentinel: `INF + x = INF`, `INF - x = INF`, and finite
/// subtraction floors at zero. Ordering is the plain integer order, so
/// `INF < INF` is false.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pn(u64);

impl Pn {
    pub const ZERO: Pn = Pn(0);
    pub const ONE: Pn = Pn(1);
    pub const INF: Pn = Pn(u64::MAX);
    /// Largest finite value; sums that would reach it saturate to infinity.
    pub const MAX_FINITE: u64 = u64::MAX - 1;

    pub fn new(v: u64) -> Pn {
        Pn(v.min(Self::MAX_FINITE))
    }

    pub fn is_inf(self) -> bool {
        self == Pn::INF
    }

    pub fn finite(self) -> Option<u64> {
        (!self.is_inf()).then_some(self.0)
    }

    /// Raw value; `u64::MAX` stands for infinity.
    pub fn raw(self) -> u64 {
        self.0
    }
}

impl Add for Pn {
    type Output = Pn;
    fn add(self, rhs: Pn) -> Pn {
        if self.is_inf() || rhs.is_inf() {
            return Pn::INF;
        }
        match self.0.checked_add(rhs.0) {
            Some(v) if v <= Self::MAX_FINITE => Pn(v),
            _ => Pn::INF,
        }
    }
}

impl Sub for Pn {
    type Output = Pn;
    fn sub(self, rhs: Pn) -> Pn {
        if self.is_inf() {
            Pn::INF
        } else if rhs.is_inf() {
            Pn::ZERO
        } else {
            Pn(self.0.saturating_sub(rhs.0))
        }
    }
}

impl From<u64> for Pn {
    fn from(v: u64) -> Pn {
        Pn::new(v)
    }
}

impl fmt::Display for Pn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.finite() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for Pn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Pn {
    type Err = String;
    fn from_str(s: &str) -> Result<Pn, String> {
        if s == "inf" {
            return Ok(Pn::INF);
        }
        s.parse::<u64>()
            .ok()
            .filter(|&v| v <= Self::MAX_FINITE)
            .map(Pn)
            .ok_or_else(|| format!("not a proof number: {s:?}"))
    }
}

/// Saturating sum; empty sum is zero.
pub fn pn_sum<I: IntoIterator<Item = Pn>>(values: I) -> Pn {
    values.into_iter().fold(Pn::ZERO, |a, b| a + b)
}

/// The (pn, dn) pair of a node.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Numbers {
    pub pn: Pn,
    pub dn: Pn,
}

impl Numbers {
    pub const LEAF: Numbers = Numbers { pn: Pn::ONE, dn: Pn::ONE };
    pub const PROVED: Numbers = Numbers { pn: Pn::ZERO, dn: Pn::INF };
    pub const DISPROVED: Numbers = Numbers { pn: Pn::INF, dn: Pn::ZERO };

    pub fn new(pn: Pn, dn: Pn) -> Numbers {
        Numbers { pn, dn }
    }

    /// Numbers of a solved node: `win` means proved.
    pub fn solved(win: bool) -> Numbers {
        if win {
            Numbers::PROVED
        } else {
            Numbers::DISPROVED
        }
    }

    pub fn is_proved(self) -> bool {
        self.pn == Pn::ZERO
    }

    pub fn is_disproved(self) -> bool {
        self.dn == Pn::ZERO
    }

    pub fn is_solved(self) -> bool {
        self.is_proved() || self.is_disproved()
    }

    /// `Some(true)` for a proved node, `Some(false)` for a disproved one.
    pub fn outcome(self) -> Option<bool> {
        if self.is_proved() {
            Some(true)
        } else if self.is_disproved() {
            Some(false)
        } else {
            None
        }
    }

    pub fn min(self) -> Pn {
        self.pn.min(self.dn)
    }
}

/// Smallest natural not in `values`.
pub fn mex<I: IntoIterator<Item = u32>>(values: I) -> u32 {
    let mut seen: Vec<bool> = Vec::new();
    for v in values {
        let v = v as usize;
        if v >= seen.len() {
            // values beyond the count of inputs can never be the mex
            if v > 1 << 20 {
                continue;
            }
            seen.resize(v + 1, false);
        }
        seen[v] = true;
    }
    seen.iter().position(|&s| !s).unwrap_or(seen.len()) as u32
}

/// Bitwise xor of all values.
pub fn nim_sum<I: IntoIterator<Item = u32>>(values: I) -> u32 {
    values.into_iter().fold(0, |a, b| a ^ b)
}
