//! Text grammar for Sprouts positions.
//!
//! ```text
//! position  := "0*" n | "!" | component ("+" component)* "!"?
//! component := region+
//! region    := boundary+ "}"
//! boundary  := vertex+ "."
//! vertex    := "0" | "1" | "2" | "3"          a vertex met once, by degree
//!            | "A".."Z" | "(" n ")"          a degree-2 vertex met more than once
//!            | "a".."z" | "[" n "]"          a degree-3 vertex met more than once
//! ```
//!
//! Letters name label 0..25; the bracketed forms name any label. Labels are
//! scoped to their component. `0*n` is `n` isolated spots in one region, and
//! `!` alone is the empty position. Keys produced by `canonical_key` always
//! end with `!`.

use std::collections::HashMap;

use super::SproutsPosition;
use crate::game::ParseError;

pub fn parse(text: &str) -> Result<SproutsPosition, ParseError> {
    let lead = text.len() - text.trim_start().len();
    let t = text.trim();
    if t.is_empty() {
        return Err(ParseError::new(lead, "empty position text"));
    }
    if let Some(n) = t.strip_prefix("0*") {
        let n: usize = n.parse().map_err(|_| ParseError::new(lead + 2, format!("bad spot count {n:?}")))?;
        return Ok(SproutsPosition::spots(n));
    }
    let bytes = t.as_bytes();
    let mut regions = Vec::new();
    let mut degree: Vec<u8> = Vec::new();
    let mut labels: HashMap<(u32, bool), u32> = HashMap::new();
    let mut region: Vec<Vec<u32>> = Vec::new();
    let mut boundary: Vec<u32> = Vec::new();
    let mut comp_regions = 0usize;
    let mut i = 0;
    let err = |at: usize, why: &str| ParseError::new(lead + at, why);
    while i < bytes.len() {
        let c = bytes[i];
        let mut label_ref: Option<(u32, bool)> = None;
        match c {
            b'0'..=b'3' => {
                boundary.push(degree.len() as u32);
                degree.push(c - b'0');
            }
            b'A'..=b'Z' => label_ref = Some(((c - b'A') as u32, false)),
            b'a'..=b'z' => label_ref = Some(((c - b'a') as u32, true)),
            b'(' | b'[' => {
                let close = if c == b'(' { b')' } else { b']' };
                let end = bytes[i + 1..]
                    .iter()
                    .position(|&x| x == close)
                    .ok_or_else(|| err(i, "unterminated label"))?
                    + i
                    + 1;
                let id: u32 = t[i + 1..end].parse().map_err(|_| err(i + 1, "bad label number"))?;
                label_ref = Some((id, c == b'['));
                i = end;
            }
            b'.' => {
                if boundary.is_empty() {
                    return Err(err(i, "empty boundary"));
                }
                region.push(std::mem::take(&mut boundary));
            }
            b'}' => {
                if !boundary.is_empty() {
                    return Err(err(i, "boundary not terminated by '.'"));
                }
                if region.is_empty() {
                    return Err(err(i, "region without boundaries"));
                }
                regions.push(std::mem::take(&mut region));
                comp_regions += 1;
            }
            b'+' | b'!' => {
                if !boundary.is_empty() || !region.is_empty() {
                    return Err(err(i, "region not terminated by '}'"));
                }
                if c == b'+' && comp_regions == 0 {
                    return Err(err(i, "empty component"));
                }
                if c == b'!' && i + 1 != bytes.len() {
                    return Err(err(i + 1, "trailing input after '!'"));
                }
                if c == b'!' && comp_regions == 0 && !regions.is_empty() {
                    return Err(err(i, "empty component"));
                }
                labels.clear();
                comp_regions = 0;
            }
            _ => return Err(err(i, &format!("unexpected character {:?}", c as char))),
        }
        if let Some(key) = label_ref {
            let v = *labels.entry(key).or_insert_with(|| {
                degree.push(if key.1 { 3 } else { 2 });
                degree.len() as u32 - 1
            });
            boundary.push(v);
        }
        i += 1;
    }
    if !boundary.is_empty() || !region.is_empty() {
        return Err(err(bytes.len(), "unexpected end of input"));
    }
    SproutsPosition::from_parts(regions, degree).map_err(|why| err(0, &why))
}
