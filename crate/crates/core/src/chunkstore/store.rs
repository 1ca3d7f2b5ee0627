use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Component, Path, PathBuf};
use std::sync::{Arc, Mutex};

use super::{join_key, ArrayData, StoreError};

/// Read-only key/value byte store. `get` must be repeatable within a
/// session and safe to call from several threads.
pub trait Store: Send + Sync {
    /// `Ok(None)` means the key does not exist; `Err` is any other failure.
    fn get(&self, key: &str) -> Result<Option<Vec<u8>>, String>;
}

/// In-memory store, mostly for tests and small embedded datasets.
#[derive(Debug, Clone, Default)]
pub struct MemoryStore {
    entries: HashMap<String, Vec<u8>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: impl Into<String>, bytes: Vec<u8>) {
        self.entries.insert(key.into(), bytes);
    }

    /// Writes an uncompressed array (metadata plus full-size chunks) under `path`.
    pub fn insert_array(
        &mut self,
        path: &str,
        shape: &[u64],
        chunk_shape: &[u64],
        data: &ArrayData,
    ) -> Result<(), StoreError> {
        let meta_key = join_key(path, "zarr.json");
        let meta = super::encode_array_metadata(shape, chunk_shape, data.dtype());
        self.insert(meta_key, meta.into_bytes());
        for (key, bytes) in super::encode_chunks(path, shape, chunk_shape, data)? {
            self.insert(key, bytes);
        }
        Ok(())
    }

    pub fn remove(&mut self, key: &str) -> Option<Vec<u8>> {
        self.entries.remove(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Snapshot of every file under `root`, keyed by `/`-separated relative path.
    pub fn from_dir(root: impl AsRef<Path>) -> std::io::Result<Self> {
        fn walk(dir: &Path, prefix: &str, out: &mut MemoryStore) -> std::io::Result<()> {
            let mut entries: Vec<_> = std::fs::read_dir(dir)?.collect::<Result<_, _>>()?;
            entries.sort_by_key(|e| e.file_name());
            for entry in entries {
                let name = entry.file_name().to_string_lossy().into_owned();
                let key = join_key(prefix, &name);
                if entry.file_type()?.is_dir() {
                    walk(&entry.path(), &key, out)?;
                } else {
                    out.insert(key, std::fs::read(entry.path())?);
                }
            }
            Ok(())
        }
        let mut store = MemoryStore::new();
        walk(root.as_ref(), "", &mut store)?;
        Ok(store)
    }
}

impl Store for MemoryStore {
    fn get(&self, key: &str) -> Result<Option<Vec<u8>>, String> {
        Ok(self.entries.get(key).cloned())
    }
}

/// Store backed by a directory; keys map to relative file paths.
#[derive(Debug, Clone)]
pub struct FilesystemStore {
    root: PathBuf,
}

impl FilesystemStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn resolve(&self, key: &str) -> Option<PathBuf> {
        let rel = Path::new(key);
        if key.is_empty() || !rel.components().all(|c| matches!(c, Component::Normal(_))) {
            return None;
        }
        Some(self.root.join(rel))
    }
}

impl Store for FilesystemStore {
    fn get(&self, key: &str) -> Result<Option<Vec<u8>>, String> {
        let Some(path) = self.resolve(key) else {
            return Err(format!("key {key:?} escapes the store root"));
        };
        match std::fs::read(&path) {
            Ok(bytes) => Ok(Some(bytes)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            // A directory in place of a key reads as absent.
            Err(_) if path.is_dir() => Ok(None),
            Err(e) => Err(e.to_string()),
        }
    }
}

type Callback = dyn FnMut(&str) -> Result<Option<Vec<u8>>, String> + Send;

/// Store whose reads are answered by a caller-supplied callback, typically
/// a function on the far side of a language binding. Calls are serialized:
/// the callback never runs twice concurrently.
pub struct CallbackStore {
    callback: Mutex<Box<Callback>>,
}

impl CallbackStore {
    pub fn new<F>(callback: F) -> Self
    where
        F: FnMut(&str) -> Result<Option<Vec<u8>>, String> + Send + 'static,
    {
        Self {
            callback: Mutex::new(Box::new(callback)),
        }
    }
}

impl fmt::Debug for CallbackStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CallbackStore").finish_non_exhaustive()
    }
}

impl Store for CallbackStore {
    fn get(&self, key: &str) -> Result<Option<Vec<u8>>, String> {
        let mut cb = self
            .callback
            .lock()
            .map_err(|_| "callback store poisoned by an earlier panic".to_string())?;
        (cb)(key)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FetchRecord {
    pub store: String,
    pub key: String,
}

/// Named stores plus a log of every successful or failed `get` issued
/// through [`StoreRegistry::fetch`].
#[derive(Default)]
pub struct StoreRegistry {
    stores: BTreeMap<String, Arc<dyn Store>>,
    log: Mutex<Vec<FetchRecord>>,
}

impl fmt::Debug for StoreRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StoreRegistry")
            .field("stores", &self.stores.keys().collect::<Vec<_>>())
            .field("fetches", &self.fetch_count())
            .finish()
    }
}

impl StoreRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: impl Into<String>, store: Arc<dyn Store>) -> Result<(), StoreError> {
        let name = name.into();
        if self.stores.contains_key(&name) {
            return Err(StoreError::DuplicateStore { name });
        }
        self.stores.insert(name, store);
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.stores.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.stores.keys().map(String::as_str)
    }

    /// Fetches `key` from store `name`, recording the fetch.
    pub fn fetch(&self, name: &str, key: &str) -> Result<Vec<u8>, StoreError> {
        let store = self
            .stores
            .get(name)
            .ok_or_else(|| StoreError::UnknownStore { name: name.into() })?;
        self.log.lock().unwrap_or_else(|e| e.into_inner()).push(FetchRecord {
            store: name.to_string(),
            key: key.to_string(),
        });
        match store.get(key) {
            Ok(Some(bytes)) => Ok(bytes),
            Ok(None) => Err(StoreError::NotFound {
                store: name.into(),
                key: key.into(),
            }),
            Err(message) => Err(StoreError::Io {
                store: name.into(),
                key: key.into(),
                message,
            }),
        }
    }

    pub fn fetch_count(&self) -> usize {
        self.log.lock().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn fetch_log(&self) -> Vec<FetchRecord> {
        self.log.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Returns and clears the fetch log.
    pub fn take_fetch_log(&self) -> Vec<FetchRecord> {
        std::mem::take(&mut *self.log.lock().unwrap_or_else(|e| e.into_inner()))
    }
}
