//! Append-only store of proven Grundy numbers. It is never evicted and
//! doubles as the proof certificate.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use parking_lot::RwLock;
use spots_core::cert::{self, FormatError};
use spots_core::Key;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("conflicting Grundy values for {key}: {old} recorded, {new} derived")]
pub struct GnConflict {
    pub key: Key,
    pub old: u32,
    pub new: u32,
}

/// Tag of entries that were not received from a group.
pub const LOCAL: u32 = u32::MAX;

#[derive(Default)]
struct Inner {
    map: HashMap<Key, u32>,
    /// Insertion order with the group each entry came from.
    log: Vec<(Key, u32, u32)>,
}

#[derive(Default)]
pub struct GrundyDatabase {
    inner: RwLock<Inner>,
}

impl GrundyDatabase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (Key, u32)>) -> Result<Self, GnConflict> {
        let db = GrundyDatabase::new();
        for (k, g) in entries {
            db.insert(k, g)?;
        }
        Ok(db)
    }

    pub fn load(path: &Path) -> Result<Self, FormatError> {
        let m = cert::load(path)?;
        Ok(GrundyDatabase::from_entries(m).expect("certificate files hold one value per key"))
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        cert::save(path, &self.entries())
    }

    pub fn get(&self, key: &Key) -> Option<u32> {
        self.inner.read().map.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.inner.read().map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Records `gn(key) = g`. Returns whether the entry is new.
    pub fn insert(&self, key: Key, g: u32) -> Result<bool, GnConflict> {
        self.insert_from(key, g, LOCAL)
    }

    pub fn insert_from(&self, key: Key, g: u32, source: u32) -> Result<bool, GnConflict> {
        if let Some(old) = self.get(&key) {
            return check(key, old, g).map(|_| false);
        }
        let mut w = self.inner.write();
        if let Some(&old) = w.map.get(&key) {
            return check(key, old, g).map(|_| false);
        }
        w.map.insert(key.clone(), g);
        w.log.push((key, g, source));
        Ok(true)
    }

    /// Inserts a batch, returning the entries that were new.
    pub fn absorb(&self, entries: &[(Key, u32)], source: u32) -> Result<Vec<(Key, u32)>, GnConflict> {
        let mut fresh = Vec::new();
        for (k, g) in entries {
            if self.insert_from(k.clone(), *g, source)? {
                fresh.push((k.clone(), *g));
            }
        }
        Ok(fresh)
    }

    /// Length of the append log; a cursor at the head.
    pub fn head(&self) -> usize {
        self.inner.read().log.len()
    }

    /// Entries appended after `cursor`, skipping those that came from
    /// `exclude`, and the new cursor.
    pub fn delta(&self, cursor: usize, exclude: Option<u32>) -> (Vec<(Key, u32)>, usize) {
        let r = self.inner.read();
        let from = cursor.min(r.log.len());
        let out = r.log[from..]
            .iter()
            .filter(|(_, _, src)| Some(*src) != exclude)
            .map(|(k, g, _)| (k.clone(), *g))
            .collect();
        (out, r.log.len())
    }

    pub fn entries(&self) -> BTreeMap<Key, u32> {
        self.inner.read().map.iter().map(|(k, g)| (k.clone(), *g)).collect()
    }

    pub fn mean(&self) -> Option<f64> {
        let r = self.inner.read();
        if r.map.is_empty() {
            None
        } else {
            Some(r.map.values().map(|&g| g as f64).sum::<f64>() / r.map.len() as f64)
        }
    }
}

fn check(key: Key, old: u32, new: u32) -> Result<(), GnConflict> {
    if old == new {
        Ok(())
    } else {
        Err(GnConflict { key, old, new })
    }
}
