//! JSON plot specs and the one-call render entry points built on them.
//!
//! A spec names its stores, a camera, an output size and a layer tree. The
//! CLI, the HTTP service and language bindings all go through [`Session`],
//! which is what keeps their output byte-identical.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Component, Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::chunkstore::{FilesystemStore, MemoryStore, Store, StoreError, StoreRegistry};
use crate::drawlist::{PngError, Rgba8};
use crate::geom::Point;
use crate::layers::{AxisProps, BarProps, HistogramProps, ImageProps, LineProps, ScatterProps, TextProps};
use crate::scene::{
    Camera2D, Frame, LayerError, LayerNode, MemoCache, OutputKind, RenderError, RenderOutput, RenderParams, Renderer,
};

pub const SPEC_VERSION: u32 = 1;

/// Layer `type` values a spec may use.
pub const LAYER_TYPES: [&str; 7] = ["scatter", "image", "histogram", "axis", "line", "text", "bar"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotSpec {
    pub spec_version: u32,
    pub width: u32,
    pub height: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device_pixel_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background: Option<Rgba8>,
    pub camera: CameraSpec,
    #[serde(default)]
    pub stores: Vec<StoreSpec>,
    #[serde(default)]
    pub layers: Vec<LayerSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraSpec {
    pub center: [f64; 2],
    pub zoom: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StoreKind {
    /// Chunks are read from disk on demand.
    Filesystem,
    /// The directory is loaded into memory when the render starts.
    Memory,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoreSpec {
    pub name: String,
    pub kind: StoreKind,
    pub root: String,
}

/// A layer: its `type`, an optional `id`, children, and every other key as
/// that type's props.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<LayerSpec>,
    #[serde(flatten)]
    pub props: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: at `{path}`: {message}")]
    Field {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("at `{path}`: {message}")]
    Invalid { path: String, message: String },
    #[error("store {name:?}: root {root:?} is outside the allowed store roots")]
    RootDenied { name: String, root: String },
}

impl SpecError {
    fn invalid(path: impl Into<String>, message: impl fmt::Display) -> Self {
        SpecError::Invalid {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

fn check_props(kind: &str, props: &Map<String, Value>, path: &str) -> Result<(), SpecError> {
    fn check<T: for<'de> Deserialize<'de>>(props: &Map<String, Value>, path: &str) -> Result<(), SpecError> {
        let value = Value::Object(props.clone());
        serde_path_to_error::deserialize::<_, T>(value)
            .map(|_| ())
            .map_err(|e| {
                let inner = e.path().to_string();
                let full = if inner == "." {
                    path.to_string()
                } else {
                    format!("{path}.{inner}")
                };
                SpecError::invalid(full, e.into_inner())
            })
    }
    match kind {
        "scatter" => check::<ScatterProps>(props, path),
        "image" => check::<ImageProps>(props, path),
        "histogram" => check::<HistogramProps>(props, path),
        "axis" => check::<AxisProps>(props, path),
        "line" => check::<LineProps>(props, path),
        "text" => check::<TextProps>(props, path),
        "bar" => check::<BarProps>(props, path),
        other => Err(SpecError::invalid(
            format!("{path}.type"),
            format!(
                "unknown layer type {other:?}, expected one of {}",
                LAYER_TYPES.join(", ")
            ),
        )),
    }
}

/// Every `{store, path}` object inside `value`, with its JSON path.
fn array_refs<'a>(value: &'a Value, path: String, out: &mut Vec<(String, &'a str, &'a str)>) {
    match value {
        Value::Object(m) => {
            if let (Some(Value::String(s)), Some(Value::String(p))) = (m.get("store"), m.get("path")) {
                out.push((path.clone(), s, p));
            }
            for (k, v) in m {
                array_refs(v, format!("{path}.{k}"), out);
            }
        }
        Value::Array(a) => {
            for (i, v) in a.iter().enumerate() {
                array_refs(v, format!("{path}[{i}]"), out);
            }
        }
        _ => {}
    }
}

fn safe_relative(p: &str) -> bool {
    Path::new(p)
        .components()
        .all(|c| matches!(c, Component::Normal(_) | Component::CurDir))
}

impl PlotSpec {
    /// Parses and validates a spec. Errors name the offending line or field.
    pub fn from_json(text: &str) -> Result<PlotSpec, SpecError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: PlotSpec = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if inner.is_syntax() || inner.is_eof() || path == "." {
                SpecError::Syntax {
                    line: inner.line(),
                    column: inner.column(),
                    message: strip_position(&inner),
                }
            } else {
                SpecError::Field {
                    path,
                    line: inner.line(),
                    column: inner.column(),
                    message: strip_position(&inner),
                }
            }
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_value(value: Value) -> Result<PlotSpec, SpecError> {
        let spec: PlotSpec = serde_path_to_error::deserialize(value)
            .map_err(|e| SpecError::invalid(e.path().to_string(), e.into_inner()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Checks everything that does not need the stores: version, sizes,
    /// camera, store declarations, layer types and their props.
    pub fn validate(&self) -> Result<(), SpecError> {
        if self.spec_version != SPEC_VERSION {
            return Err(SpecError::invalid(
                "spec_version",
                format!(
                    "unsupported spec_version {}, expected {SPEC_VERSION}",
                    self.spec_version
                ),
            ));
        }
        self.render_params(OutputKind::Bitmap)
            .validate()
            .map_err(|e| SpecError::invalid("width", e))?;
        self.camera()?;
        let mut names = BTreeSet::new();
        for (i, s) in self.stores.iter().enumerate() {
            if s.name.is_empty() {
                return Err(SpecError::invalid(
                    format!("stores[{i}].name"),
                    "store name must not be empty",
                ));
            }
            if !names.insert(s.name.as_str()) {
                return Err(SpecError::invalid(
                    format!("stores[{i}].name"),
                    format!("duplicate store name {:?}", s.name),
                ));
            }
        }
        let mut ids = BTreeSet::new();
        for (i, l) in self.layers.iter().enumerate() {
            validate_layer(l, format!("layers[{i}]"), &mut ids)?;
        }
        Ok(())
    }

    /// Fails if a layer references a store that is neither declared in the
    /// spec nor among `registered`.
    pub fn check_store_refs(&self, registered: &[&str]) -> Result<(), SpecError> {
        let declared: BTreeSet<&str> = self.stores.iter().map(|s| s.name.as_str()).collect();
        let layers = serde_json::to_value(&self.layers).expect("layers serialize");
        let mut refs = Vec::new();
        array_refs(&layers, "layers".into(), &mut refs);
        for (path, store, _) in refs {
            if !declared.contains(store) && !registered.contains(&store) {
                return Err(SpecError::invalid(
                    format!("{path}.store"),
                    format!("store {store:?} is not declared"),
                ));
            }
        }
        Ok(())
    }

    pub fn camera(&self) -> Result<Camera2D, SpecError> {
        let [x, y] = self.camera.center;
        Camera2D::new(Point::new(x, y), self.camera.zoom, self.width, self.height)
            .map_err(|e| SpecError::invalid("camera", e))
    }

    pub fn render_params(&self, output: OutputKind) -> RenderParams {
        RenderParams {
            width_px: self.width,
            height_px: self.height,
            device_pixel_ratio: self.device_pixel_ratio.unwrap_or(1.0),
            background: self.background.unwrap_or(Rgba8::WHITE),
            output,
        }
    }

    /// Copy with a different output size; the camera keeps its center and
    /// zoom and sees more or less of the world.
    pub fn with_size(&self, width: Option<u32>, height: Option<u32>) -> Result<PlotSpec, SpecError> {
        let mut s = self.clone();
        s.width = width.unwrap_or(s.width);
        s.height = height.unwrap_or(s.height);
        s.validate()?;
        Ok(s)
    }

    /// The layer tree, with ids filled in from tree position when absent.
    pub fn scene(&self) -> Vec<LayerNode> {
        fn node(l: &LayerSpec, auto_id: String) -> LayerNode {
            let id = l.id.clone().unwrap_or_else(|| auto_id.clone());
            let children = l
                .children
                .iter()
                .enumerate()
                .map(|(i, c)| node(c, format!("{auto_id}.{i}")))
                .collect();
            LayerNode {
                id,
                kind: l.kind.clone(),
                props: Value::Object(l.props.clone()),
                children,
            }
        }
        self.layers
            .iter()
            .enumerate()
            .map(|(i, l)| node(l, format!("{}-{i}", l.kind)))
            .collect()
    }
}

fn validate_layer<'a>(l: &'a LayerSpec, path: String, ids: &mut BTreeSet<&'a str>) -> Result<(), SpecError> {
    if let Some(id) = &l.id {
        if !ids.insert(id.as_str()) {
            return Err(SpecError::invalid(
                format!("{path}.id"),
                format!("duplicate layer id {id:?}"),
            ));
        }
    }
    check_props(&l.kind, &l.props, &path)?;
    let props = Value::Object(l.props.clone());
    let mut refs = Vec::new();
    array_refs(&props, path.clone(), &mut refs);
    for (p, _, array_path) in refs {
        if !safe_relative(array_path) {
            return Err(SpecError::invalid(
                format!("{p}.path"),
                format!("array path {array_path:?} must be relative without `..`"),
            ));
        }
    }
    for (i, c) in l.children.iter().enumerate() {
        validate_layer(c, format!("{path}.children[{i}]"), ids)?;
    }
    Ok(())
}

fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

/// Where filesystem and memory store roots may point.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StorePolicy {
    /// `None` allows any root. Otherwise each root must resolve inside one
    /// of these directories, and relative roots resolve against the first.
    pub allowed_roots: Option<Vec<PathBuf>>,
}

impl StorePolicy {
    pub fn unrestricted() -> Self {
        Self::default()
    }

    pub fn confined(roots: Vec<PathBuf>) -> Self {
        Self {
            allowed_roots: Some(roots),
        }
    }

    /// Resolves a store root. Relative roots are taken from `base_dir`, or
    /// from the first allowed root when confined.
    pub fn resolve(&self, store: &StoreSpec, base_dir: &Path) -> Result<PathBuf, EngineError> {
        let root = Path::new(&store.root);
        let Some(allowed) = &self.allowed_roots else {
            return Ok(base_dir.join(root));
        };
        let denied = || {
            EngineError::Spec(SpecError::RootDenied {
                name: store.name.clone(),
                root: store.root.clone(),
            })
        };
        let first = allowed.first().ok_or_else(denied)?;
        if root.components().any(|c| matches!(c, Component::ParentDir)) {
            return Err(denied());
        }
        let joined = first.join(root);
        let canonical = joined.canonicalize().map_err(|_| {
            EngineError::Store(StoreError::NotFound {
                store: store.name.clone(),
                key: store.root.clone(),
            })
        })?;
        let inside = allowed
            .iter()
            .filter_map(|a| a.canonicalize().ok())
            .any(|a| canonical.starts_with(a));
        if inside {
            Ok(canonical)
        } else {
            Err(denied())
        }
    }
}

/// Every failure a spec render can hit, classified for frontends.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid spec: {0}")]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("encoding png: {0}")]
    Encode(#[from] PngError),
}

/// Coarse error class, which frontends map to exit codes and HTTP statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The spec or request is wrong; fixing the input fixes the error.
    InvalidSpec,
    /// A store, array or chunk does not exist.
    NotFound,
    /// The data exists but could not be read or used.
    Data,
    Internal,
}

impl EngineError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            EngineError::Spec(_) => ErrorKind::InvalidSpec,
            EngineError::Store(e) if e.is_not_found() => ErrorKind::NotFound,
            EngineError::Store(StoreError::InvalidKey { .. }) => ErrorKind::InvalidSpec,
            EngineError::Store(_) => ErrorKind::Data,
            EngineError::Render(e) => match e {
                RenderError::InvalidParams(_)
                | RenderError::DuplicateLayerId(_)
                | RenderError::UnknownLayerKind { .. } => ErrorKind::InvalidSpec,
                RenderError::Layer { source, .. } => match source {
                    LayerError::Props(_) | LayerError::VectorCapacity { .. } => ErrorKind::InvalidSpec,
                    LayerError::Store(s) if s.is_not_found() => ErrorKind::NotFound,
                    LayerError::Store(StoreError::InvalidKey { .. }) => ErrorKind::InvalidSpec,
                    LayerError::Store(_) | LayerError::Compute(_) | LayerError::Data(_) => ErrorKind::Data,
                    LayerError::Primitive(_) => ErrorKind::Internal,
                },
            },
            EngineError::Encode(_) => ErrorKind::Internal,
        }
    }
}

/// Stores registered by a host (e.g. foreign callback stores) plus a memo
/// cache reused across renders while the spec's store declarations stay
/// the same.
pub struct Session {
    renderer: Renderer,
    stores: Vec<(String, Arc<dyn Store>)>,
    policy: StorePolicy,
    base_dir: PathBuf,
    cache: MemoCache,
    cached_for: Option<Vec<StoreSpec>>,
}

impl fmt::Debug for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Session")
            .field("stores", &self.stores.iter().map(|(n, _)| n).collect::<Vec<_>>())
            .field("policy", &self.policy)
            .field("base_dir", &self.base_dir)
            .finish()
    }
}

impl Default for Session {
    fn default() -> Self {
        Self::new()
    }
}

impl Session {
    pub fn new() -> Self {
        Self {
            renderer: Renderer::default(),
            stores: Vec::new(),
            policy: StorePolicy::default(),
            base_dir: PathBuf::from("."),
            cache: MemoCache::new(),
            cached_for: None,
        }
    }

    pub fn with_renderer(mut self, renderer: Renderer) -> Self {
        self.renderer = renderer;
        self
    }

    pub fn with_policy(mut self, policy: StorePolicy) -> Self {
        self.policy = policy;
        self
    }

    /// Directory relative store roots resolve against.
    pub fn with_base_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.base_dir = dir.into();
        self
    }

    /// Makes `store` resolvable by name from specs rendered in this session.
    /// Nothing is read until a render needs it.
    pub fn register_store(&mut self, name: impl Into<String>, store: Arc<dyn Store>) -> Result<(), StoreError> {
        let name = name.into();
        if self.stores.iter().any(|(n, _)| *n == name) {
            return Err(StoreError::DuplicateStore { name });
        }
        self.stores.push((name, store));
        Ok(())
    }

    pub fn cache(&self) -> &MemoCache {
        &self.cache
    }

    /// Builds the registry for one render: session stores first, then the
    /// spec's declared stores.
    pub fn registry_for(&self, spec: &PlotSpec) -> Result<StoreRegistry, EngineError> {
        let mut reg = StoreRegistry::new();
        for (name, store) in &self.stores {
            reg.register(name.clone(), store.clone())?;
        }
        for (i, s) in spec.stores.iter().enumerate() {
            if self.stores.iter().any(|(n, _)| *n == s.name) {
                return Err(SpecError::invalid(
                    format!("stores[{i}].name"),
                    format!("store {:?} is already registered by the host", s.name),
                )
                .into());
            }
            let root = self.policy.resolve(s, &self.base_dir)?;
            let store: Arc<dyn Store> = match s.kind {
                StoreKind::Filesystem => Arc::new(FilesystemStore::new(root)),
                StoreKind::Memory => Arc::new(MemoryStore::from_dir(&root).map_err(|e| {
                    if e.kind() == std::io::ErrorKind::NotFound {
                        StoreError::NotFound {
                            store: s.name.clone(),
                            key: s.root.clone(),
                        }
                    } else {
                        StoreError::Io {
                            store: s.name.clone(),
                            key: s.root.clone(),
                            message: e.to_string(),
                        }
                    }
                })?),
            };
            reg.register(s.name.clone(), store)?;
        }
        Ok(reg)
    }

    pub fn render_frame(&mut self, spec: &PlotSpec, output: OutputKind) -> Result<Frame, EngineError> {
        spec.validate()?;
        let names: Vec<&str> = self.stores.iter().map(|(n, _)| n.as_str()).collect();
        spec.check_store_refs(&names)?;
        let registry = self.registry_for(spec)?;
        if self.cached_for.as_ref() != Some(&spec.stores) {
            self.cache.clear();
            self.cached_for = Some(spec.stores.clone());
        }
        let camera = spec.camera()?;
        let params = spec.render_params(output);
        Ok(self
            .renderer
            .render_frame(&spec.scene(), &camera, &params, &registry, &mut self.cache)?)
    }

    pub fn render(&mut self, spec: &PlotSpec, output: OutputKind) -> Result<RenderOutput, EngineError> {
        self.render_frame(spec, output).map(|f| f.output)
    }

    pub fn render_png(&mut self, spec: &PlotSpec) -> Result<Vec<u8>, EngineError> {
        Ok(self.render(spec, OutputKind::Bitmap)?.encode()?)
    }

    pub fn render_svg(&mut self, spec: &PlotSpec) -> Result<String, EngineError> {
        match self.render(spec, OutputKind::Vector)? {
            RenderOutput::Vector { svg } => Ok(svg),
            RenderOutput::Bitmap { .. } => unreachable!("vector output requested"),
        }
    }
}

/// PNG bytes for a spec, with store roots relative to `base_dir`.
pub fn render_png(spec: &PlotSpec, base_dir: &Path) -> Result<Vec<u8>, EngineError> {
    Session::new().with_base_dir(base_dir).render_png(spec)
}

/// SVG markup for a spec, with store roots relative to `base_dir`.
pub fn render_svg(spec: &PlotSpec, base_dir: &Path) -> Result<String, EngineError> {
    Session::new().with_base_dir(base_dir).render_svg(spec)
}
