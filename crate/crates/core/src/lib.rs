//! Headless 2D plot rendering: layer trees over chunked arrays, drawn to
//! RGBA bitmaps (and PNG) or SVG from one backend-neutral draw list.

pub mod chunkstore;
pub mod compute;
pub mod drawlist;
pub mod geom;
pub mod interact;
pub mod layers;
pub mod plotspec;
pub mod scene;

pub use chunkstore::{ArrayHandle, CallbackStore, FilesystemStore, MemoryStore, Store, StoreError, StoreRegistry};
pub use compute::{ComputeBackend, CpuBackend, WorkgroupBackend};
pub use drawlist::{DrawList, Primitive, Rgba8};
pub use geom::{Bounds, Point};
pub use interact::{PickIndex, PickResult};
pub use plotspec::{render_png, render_svg, EngineError, ErrorKind, PlotSpec, Session, SpecError, StorePolicy};
pub use scene::{
    render, Camera2D, LayerNode, MemoCache, OutputKind, RenderError, RenderOutput, RenderParams, Renderer,
};
