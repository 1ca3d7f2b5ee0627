use std::any::Any;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Stable 64-bit content hash of a dependency list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fingerprint(pub u64);

/// Hashes the canonical JSON serialization of `deps` with SHA-256 and keeps
/// the first 8 bytes. Equal fingerprints are treated as equal deps.
pub fn fingerprint<D: Serialize + ?Sized>(deps: &D) -> Fingerprint {
    let bytes = serde_json::to_vec(deps).expect("memo deps must serialize to JSON");
    let digest = Sha256::digest(&bytes);
    Fingerprint(u64::from_le_bytes(digest[..8].try_into().unwrap()))
}

struct Entry {
    fingerprint: Fingerprint,
    value: Arc<dyn Any + Send + Sync>,
    last_used: u64,
    group: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MemoStats {
    pub hits: u64,
    pub misses: u64,
    pub evictions: u64,
}

/// `use_memo`-style cache: one entry per key, recomputed only when the
/// fingerprint of its deps changes. Entries may belong to a bounded group
/// that evicts least-recently-used entries beyond a capacity.
#[derive(Default)]
pub struct MemoCache {
    entries: HashMap<String, Entry>,
    clock: u64,
    stats: MemoStats,
}

impl fmt::Debug for MemoCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MemoCache")
            .field("entries", &self.entries.len())
            .field("stats", &self.stats)
            .finish()
    }
}

impl MemoCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn group_len(&self, group: &str) -> usize {
        self.entries
            .values()
            .filter(|e| e.group.as_deref() == Some(group))
            .count()
    }

    pub fn stats(&self) -> MemoStats {
        self.stats
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    /// Returns the cached value for `key` if `deps` are unchanged, otherwise
    /// runs `compute` and stores its result. Errors are returned without
    /// being cached.
    pub fn memoize<T, E, D, F>(&mut self, key: &str, deps: &D, compute: F) -> Result<Arc<T>, E>
    where
        T: Send + Sync + 'static,
        D: Serialize + ?Sized,
        F: FnOnce() -> Result<T, E>,
    {
        self.lookup_or_compute(None, key, deps, compute)
    }

    /// The cached value for `key` when its deps are unchanged and it holds a
    /// `T`. A hit refreshes the entry's recency; a miss computes nothing.
    pub fn peek<T, D>(&mut self, key: &str, deps: &D) -> Option<Arc<T>>
    where
        T: Send + Sync + 'static,
        D: Serialize + ?Sized,
    {
        let fp = fingerprint(deps);
        let entry = self.entries.get_mut(key)?;
        if entry.fingerprint != fp {
            return None;
        }
        let value = entry.value.clone().downcast::<T>().ok()?;
        self.clock += 1;
        entry.last_used = self.clock;
        self.stats.hits += 1;
        Some(value)
    }

    /// Like [`MemoCache::memoize`], with the entry counted against `group`,
    /// which keeps at most `capacity` entries (least recently used go first).
    pub fn memoize_bounded<T, E, D, F>(
        &mut self,
        group: &str,
        capacity: usize,
        key: &str,
        deps: &D,
        compute: F,
    ) -> Result<Arc<T>, E>
    where
        T: Send + Sync + 'static,
        D: Serialize + ?Sized,
        F: FnOnce() -> Result<T, E>,
    {
        let value = self.lookup_or_compute(Some(group), key, deps, compute)?;
        self.evict(group, capacity.max(1), key);
        Ok(value)
    }

    fn lookup_or_compute<T, E, D, F>(
        &mut self,
        group: Option<&str>,
        key: &str,
        deps: &D,
        compute: F,
    ) -> Result<Arc<T>, E>
    where
        T: Send + Sync + 'static,
        D: Serialize + ?Sized,
        F: FnOnce() -> Result<T, E>,
    {
        assert!(!key.is_empty(), "memo keys must be non-empty");
        self.clock += 1;
        let fp = fingerprint(deps);
        if let Some(entry) = self.entries.get_mut(key) {
            if entry.fingerprint == fp {
                if let Ok(value) = entry.value.clone().downcast::<T>() {
                    entry.last_used = self.clock;
                    self.stats.hits += 1;
                    return Ok(value);
                }
            }
        }
        self.stats.misses += 1;
        let value = Arc::new(compute()?);
        self.entries.insert(
            key.to_string(),
            Entry {
                fingerprint: fp,
                value: value.clone(),
                last_used: self.clock,
                group: group.map(str::to_string),
            },
        );
        Ok(value)
    }

    fn evict(&mut self, group: &str, capacity: usize, keep: &str) {
        loop {
            let members: Vec<(&String, u64)> = self
                .entries
                .iter()
                .filter(|(_, e)| e.group.as_deref() == Some(group))
                .map(|(k, e)| (k, e.last_used))
                .collect();
            if members.len() <= capacity {
                return;
            }
            let victim = members
                .into_iter()
                .filter(|(k, _)| k.as_str() != keep)
                .min_by_key(|(_, t)| *t)
                .map(|(k, _)| k.clone());
            match victim {
                Some(k) => {
                    self.entries.remove(&k);
                    self.stats.evictions += 1;
                }
                None => return,
            }
        }
    }
}
