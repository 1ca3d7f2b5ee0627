use std::any::Any;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Camera2D, MemoCache, OutputKind, RenderParams};
use crate::chunkstore::{StoreError, StoreRegistry};
use crate::compute::{ComputeBackend, ComputeError};
use crate::drawlist::{Primitive, PrimitiveError};
use crate::interact::PickIndex;

/// One layer instance in a scene: a kind tag, that kind's properties, and
/// child layers drawn after the layer's own primitives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerNode {
    pub id: String,
    pub kind: String,
    #[serde(default)]
    pub props: serde_json::Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<LayerNode>,
}

impl LayerNode {
    pub fn new(id: impl Into<String>, kind: impl Into<String>, props: impl Serialize) -> Self {
        Self {
            id: id.into(),
            kind: kind.into(),
            props: serde_json::to_value(props).expect("layer props must serialize"),
            children: Vec::new(),
        }
    }

    pub fn with_children(mut self, children: Vec<LayerNode>) -> Self {
        self.children = children;
        self
    }

    /// Deserializes `props` into a kind-specific record.
    pub fn props<T: for<'de> Deserialize<'de>>(&self) -> Result<T, LayerError> {
        serde_json::from_value(self.props.clone()).map_err(|e| LayerError::Props(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LayerError {
    #[error("invalid props: {0}")]
    Props(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Compute(#[from] ComputeError),
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
    #[error("{visible} visible points exceed the vector output cap of {cap}; render a bitmap instead")]
    VectorCapacity { visible: usize, cap: usize },
    #[error("{0}")]
    Data(String),
}

impl LayerError {
    pub fn is_not_found(&self) -> bool {
        matches!(self, LayerError::Store(e) if e.is_not_found())
    }
}

/// Result of a layer's `prepare`, handed back to its `draw`.
pub type Prepared = Box<dyn Any + Send>;

/// Everything `prepare` may use: the frame's camera and params, the store
/// registry, the compute backend, and a memo cache namespaced to the layer.
pub struct PrepareContext<'a> {
    pub camera: &'a Camera2D,
    pub params: &'a RenderParams,
    pub registry: &'a StoreRegistry,
    pub compute: &'a dyn ComputeBackend,
    layer_id: &'a str,
    cache: &'a mut MemoCache,
}

impl<'a> PrepareContext<'a> {
    pub(crate) fn new(
        camera: &'a Camera2D,
        params: &'a RenderParams,
        registry: &'a StoreRegistry,
        compute: &'a dyn ComputeBackend,
        layer_id: &'a str,
        cache: &'a mut MemoCache,
    ) -> Self {
        Self {
            camera,
            params,
            registry,
            compute,
            layer_id,
            cache,
        }
    }

    pub fn layer_id(&self) -> &str {
        self.layer_id
    }

    /// Full cache key for a layer-local `key`. Length-prefixed so ids
    /// containing separators cannot collide.
    pub fn scoped_key(&self, key: &str) -> String {
        format!("{}:{}:{}", self.layer_id.len(), self.layer_id, key)
    }

    pub fn memo<T, E, D, F>(&mut self, key: &str, deps: &D, compute: F) -> Result<Arc<T>, E>
    where
        T: Send + Sync + 'static,
        D: Serialize + ?Sized,
        F: FnOnce() -> Result<T, E>,
    {
        let key = self.scoped_key(key);
        self.cache.memoize(&key, deps, compute)
    }

    pub fn memo_peek<T, D>(&mut self, key: &str, deps: &D) -> Option<Arc<T>>
    where
        T: Send + Sync + 'static,
        D: Serialize + ?Sized,
    {
        let key = self.scoped_key(key);
        self.cache.peek(&key, deps)
    }

    pub fn memo_bounded<T, E, D, F>(
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
        let group = self.scoped_key(group);
        let key = self.scoped_key(key);
        self.cache.memoize_bounded(&group, capacity, &key, deps, compute)
    }
}

pub struct DrawContext<'a> {
    pub camera: &'a Camera2D,
    pub params: &'a RenderParams,
    pub output: OutputKind,
    pub layer_id: &'a str,
}

/// What a layer's `draw` produces: primitives in logical pixels, child
/// layers to expand right after it, and optionally a pick index.
#[derive(Debug, Default)]
pub struct LayerOutput {
    pub primitives: Vec<Primitive>,
    pub children: Vec<LayerNode>,
    pub pick: Option<PickIndex>,
}

/// A layer kind. `prepare` runs once per render and may fetch data or run
/// compute kernels (memoizing through the context); `draw` turns the
/// prepared value into primitives and/or child layers.
pub trait Layer: Send + Sync {
    fn prepare(&self, node: &LayerNode, ctx: &mut PrepareContext<'_>) -> Result<Prepared, LayerError>;

    fn draw(
        &self,
        node: &LayerNode,
        prepared: Prepared,
        ctx: &DrawContext<'_>,
        out: &mut LayerOutput,
    ) -> Result<(), LayerError>;
}

/// Layer implementations by kind tag.
#[derive(Clone, Default)]
pub struct LayerRegistry {
    kinds: BTreeMap<String, Arc<dyn Layer>>,
}

impl fmt::Debug for LayerRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.kinds.keys()).finish()
    }
}

impl LayerRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding every built-in layer kind.
    pub fn with_builtins() -> Self {
        let mut reg = Self::new();
        crate::layers::register_builtins(&mut reg);
        reg
    }

    /// Adds or replaces the implementation for `kind`.
    pub fn register(&mut self, kind: impl Into<String>, layer: Arc<dyn Layer>) {
        self.kinds.insert(kind.into(), layer);
    }

    pub fn get(&self, kind: &str) -> Option<&Arc<dyn Layer>> {
        self.kinds.get(kind)
    }

    pub fn kinds(&self) -> impl Iterator<Item = &str> {
        self.kinds.keys().map(String::as_str)
    }
}
