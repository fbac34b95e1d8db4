//! The `#spots-gn-v1` certificate format: one `key<TAB>grundy` record per
//! line after the header, sorted by key.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::game::Key;

pub const HEADER: &str = "#spots-gn-v1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn bad(line: usize, reason: impl Into<String>) -> FormatError {
    FormatError::Malformed { line, reason: reason.into() }
}

pub fn read<R: BufRead>(r: R) -> Result<BTreeMap<Key, u32>, FormatError> {
    let mut lines = r.lines();
    let header = lines.next().transpose()?;
    if header.as_deref().map(str::trim_end) != Some(HEADER) {
        return Err(bad(1, format!("missing {HEADER} header")));
    }
    let mut out = BTreeMap::new();
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let (k, g) = line.split_once('\t').ok_or_else(|| bad(n, "expected key<TAB>value"))?;
        let g: u32 = g.trim().parse().map_err(|_| bad(n, format!("bad Grundy value {g:?}")))?;
        if k.is_empty() {
            return Err(bad(n, "empty key"));
        }
        if let Some(prev) = out.insert(Key::from(k), g) {
            if prev != g {
                return Err(bad(n, format!("conflicting values for {k}")));
            }
        }
    }
    Ok(out)
}

pub fn write<W: Write>(mut w: W, entries: &BTreeMap<Key, u32>) -> io::Result<()> {
    writeln!(w, "{HEADER}")?;
    for (k, g) in entries {
        writeln!(w, "{k}\t{g}")?;
    }
    w.flush()
}

pub fn load(path: &std::path::Path) -> Result<BTreeMap<Key, u32>, FormatError> {
    let f = std::fs::File::open(path)?;
    read(io::BufReader::new(f))
}

pub fn save(path: &std::path::Path, entries: &BTreeMap<Key, u32>) -> io::Result<()> {
    let f = std::fs::File::create(path)?;
    write(io::BufWriter::new(f), entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut m = BTreeMap::new();
        m.insert(Key::from("0.}!"), 0);
        m.insert(Key::from("0.0.0.}!"), 1);
        let mut buf = Vec::new();
        write(&mut buf, &m).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("#spots-gn-v1\n"));
        assert_eq!(read(&buf[..]).unwrap(), m);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read(&b"hello\n"[..]).is_err());
        assert!(read(&b"#spots-gn-v1\nabc\n"[..]).is_err());
        assert!(read(&b"#spots-gn-v1\nabc\tx\n"[..]).is_err());
    }
}
