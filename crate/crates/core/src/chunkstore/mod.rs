//! Chunked n-dimensional array access over a small Zarr v3 subset.
//!
//! Arrays live in a [`Store`] under a path prefix: metadata at
//! `<path>/zarr.json`, chunk payloads at `<path>/c/<i0>/<i1>/...` as raw
//! little-endian C-order element bytes (no compression). Region reads fetch
//! exactly the chunks a region intersects, and every fetch goes through the
//! [`StoreRegistry`] so it can be counted.

mod meta;
mod region;
mod store;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use meta::{encode_array_metadata, open_array, parse_array_metadata, ArrayMeta, DType};
pub use region::{chunk_key, chunks_for_region, encode_chunks, read_region, ArrayData};
pub use store::{CallbackStore, FetchRecord, FilesystemStore, MemoryStore, Store, StoreRegistry};

/// Location of an array: a registered store name plus a path prefix in it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArrayHandle {
    pub store: String,
    pub path: String,
}

impl ArrayHandle {
    pub fn new(store: impl Into<String>, path: impl Into<String>) -> Self {
        Self {
            store: store.into(),
            path: path.into(),
        }
    }

    /// Joins `key` onto this handle's path prefix.
    pub fn key(&self, key: &str) -> String {
        join_key(&self.path, key)
    }

    /// Handle for a child node, e.g. a pyramid level inside a group.
    pub fn child(&self, name: &str) -> ArrayHandle {
        ArrayHandle::new(self.store.clone(), join_key(&self.path, name))
    }
}

/// `prefix/key`, ignoring slashes around `prefix` and an empty prefix.
pub fn join_key(prefix: &str, key: &str) -> String {
    let prefix = prefix.trim_matches('/');
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}/{key}")
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StoreError {
    #[error("no store registered under {name:?}")]
    UnknownStore { name: String },
    #[error("a store named {name:?} is already registered")]
    DuplicateStore { name: String },
    #[error("key {key:?} not found in store {store:?}")]
    NotFound { store: String, key: String },
    #[error("reading {key:?} from store {store:?}: {message}")]
    Io {
        store: String,
        key: String,
        message: String,
    },
    #[error("invalid store key {key:?}")]
    InvalidKey { key: String },
    #[error("invalid array metadata at {key:?}: {reason}")]
    InvalidMetadata { key: String, reason: String },
    #[error("unsupported array format at {key:?}: {reason}")]
    Unsupported { key: String, reason: String },
    #[error("corrupt chunk {key:?}: expected {expected} bytes, got {actual}")]
    CorruptChunk {
        key: String,
        expected: usize,
        actual: usize,
    },
    #[error("region out of bounds: {reason}")]
    OutOfBounds { reason: String },
}

impl StoreError {
    /// True when the failure means "this store, array or chunk does not exist".
    pub fn is_not_found(&self) -> bool {
        matches!(self, StoreError::NotFound { .. } | StoreError::UnknownStore { .. })
    }
}
