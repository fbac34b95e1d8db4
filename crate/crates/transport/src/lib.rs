//! Wire protocol of the cluster: one JSON object per line, tagged by a
//! `type` field, carried over an in-process channel pair or TCP streams.

pub mod link;

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use spots_core::Pn;
use thiserror::Error;

pub use link::{connect, in_process, Endpoint, Incoming, LinkError, MasterLink, WorkerLink};

/// Version tag carried by every `Hello`.
pub const PROTO: &str = "spots-proto-1";
/// Largest accepted frame, newline excluded.
pub const MAX_FRAME: usize = 64 << 20;
/// Most Grundy entries in one message; longer deltas are split.
pub const MAX_DELTA: usize = 10_000;

/// A proof or disproof number on the wire: an integer, or `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Num(pub Pn);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.finite() {
            Some(v) => s.serialize_u64(v),
            None => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Num, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a nonnegative integer or \"inf\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
                if v > Pn::MAX_FINITE {
                    return Err(E::custom("proof number out of range"));
                }
                Ok(Num(Pn::new(v)))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
                match v {
                    "inf" => Ok(Num(Pn::INF)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// A Grundy value keyed by canonical position.
pub type GnEntry = (String, u32);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Job {
    pub job_id: u64,
    /// Canonical key of the atomic position.
    pub position: String,
    pub nim: u32,
    pub iterations: u64,
    pub updates: u64,
    pub gn_delta: Vec<GnEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Proved,
    Disproved,
    BudgetExhausted,
    Stopped,
}

/// A child couple `key + *nim` with its numbers.
pub type ChildEntry = (String, u32, Num, Num);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Message {
    Hello {
        proto: String,
        worker_id: u32,
        group_id: u32,
        threads: u32,
    },
    Assign {
        job: Job,
    },
    Progress {
        job_id: u64,
        pn: Num,
        dn: Num,
        iterations_done: u64,
        gn_delta: Vec<GnEntry>,
    },
    Done {
        job_id: u64,
        status: Status,
        pn: Num,
        dn: Num,
        iterations_done: u64,
        children: Vec<ChildEntry>,
        gn_delta: Vec<GnEntry>,
    },
    /// Grundy entries that did not fit in the message that follows.
    Sync {
        gn_delta: Vec<GnEntry>,
    },
    Shutdown {},
}

impl Message {
    pub fn hello(worker_id: u32, group_id: u32, threads: u32) -> Message {
        Message::Hello { proto: PROTO.to_string(), worker_id, group_id, threads }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Message::Hello { .. } => "hello",
            Message::Assign { .. } => "assign",
            Message::Progress { .. } => "progress",
            Message::Done { .. } => "done",
            Message::Sync { .. } => "sync",
            Message::Shutdown {} => "shutdown",
        }
    }

    fn check(&self) -> Result<(), String> {
        let delta = match self {
            Message::Hello { proto, .. } if proto != PROTO => return Err(format!("unsupported protocol {proto:?}")),
            Message::Hello { .. } | Message::Shutdown {} => return Ok(()),
            Message::Assign { job } => {
                if job.updates < 1 || job.iterations < job.updates {
                    return Err("job needs iterations >= updates >= 1".into());
                }
                &job.gn_delta
            }
            Message::Progress { gn_delta, .. } | Message::Done { gn_delta, .. } | Message::Sync { gn_delta } => gn_delta,
        };
        if delta.len() > MAX_DELTA {
            return Err(format!("{} Grundy entries exceed the limit of {MAX_DELTA}", delta.len()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("protocol error at byte {offset}: {reason}")]
pub struct ProtocolError {
    pub offset: usize,
    pub reason: String,
}

/// One frame: the JSON object followed by a newline.
pub fn encode(m: &Message) -> Vec<u8> {
    let mut out = serde_json::to_vec(m).expect("messages always serialize");
    out.push(b'\n');
    out
}

/// Parses one frame. A single trailing newline is allowed.
pub fn decode(frame: &[u8]) -> Result<Message, ProtocolError> {
    let body = frame.strip_suffix(b"\n").unwrap_or(frame);
    let body = body.strip_suffix(b"\r").unwrap_or(body);
    if body.len() > MAX_FRAME {
        return Err(ProtocolError { offset: MAX_FRAME, reason: format!("frame of {} bytes is too large", body.len()) });
    }
    let m: Message = serde_json::from_slice(body).map_err(|e| ProtocolError {
        offset: byte_offset(body, e.line(), e.column()),
        reason: e.to_string(),
    })?;
    m.check().map_err(|reason| ProtocolError { offset: 0, reason })?;
    Ok(m)
}

fn byte_offset(body: &[u8], line: usize, column: usize) -> usize {
    let start: usize = body.split(|&b| b == b'\n').take(line.saturating_sub(1)).map(|l| l.len() + 1).sum();
    (start + column.saturating_sub(1)).min(body.len())
}

/// Splits a delta into chunks of at most [`MAX_DELTA`] entries. The result
/// has at least one chunk.
pub fn chunk_delta(delta: Vec<GnEntry>) -> Vec<Vec<GnEntry>> {
    if delta.len() <= MAX_DELTA {
        return vec![delta];
    }
    delta.chunks(MAX_DELTA).map(<[GnEntry]>::to_vec).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shutdown_is_a_bare_tag() {
        assert_eq!(encode(&Message::Shutdown {}), b"{\"type\":\"shutdown\"}\n");
    }

    #[test]
    fn infinity_round_trips() {
        let m = Message::Progress { job_id: 3, pn: Num(Pn::INF), dn: Num(Pn::ZERO), iterations_done: 10, gn_delta: vec![] };
        let f = encode(&m);
        assert!(String::from_utf8_lossy(&f).contains("\"pn\":\"inf\""));
        assert_eq!(decode(&f).unwrap(), m);
    }

    #[test]
    fn field_order_is_fixed() {
        let f = encode(&Message::hello(1, 2, 4));
        assert_eq!(f, b"{\"type\":\"hello\",\"proto\":\"spots-proto-1\",\"worker_id\":1,\"group_id\":2,\"threads\":4}\n");
    }

    #[test]
    fn bad_frames() {
        let f = encode(&Message::hello(1, 2, 4));
        let e = decode(&f[..f.len() - 5]).unwrap_err();
        assert!(e.offset > 0);
        assert!(decode(b"{\"type\":\"gossip\"}").is_err());
        assert!(decode(b"{\"type\":\"shutdown\",\"extra\":1}").is_err());
        assert!(decode(b"{\"type\":\"hello\",\"proto\":\"v0\",\"worker_id\":1,\"group_id\":2,\"threads\":4}").is_err());
        assert!(decode(b"{\"type\":\"shutdown\"}\n{\"type\":\"shutdown\"}").is_err());
        let bad_job = br#"{"type":"assign","job":{"job_id":1,"position":"0*2","nim":0,"iterations":5,"updates":6,"gn_delta":[]}}"#;
        assert!(decode(bad_job).is_err());
    }

    #[test]
    fn oversized_frame() {
        let big = vec![b' '; MAX_FRAME + 1];
        assert_eq!(decode(&big).unwrap_err().offset, MAX_FRAME);
    }

    #[test]
    fn chunks() {
        let d: Vec<GnEntry> = (0..25_001).map(|i| (i.to_string(), 0)).collect();
        let c = chunk_delta(d);
        assert_eq!(c.iter().map(Vec::len).collect::<Vec<_>>(), [10_000, 10_000, 5_001]);
        assert_eq!(chunk_delta(Vec::new()).len(), 1);
    }
}
