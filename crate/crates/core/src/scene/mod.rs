//! Scene graph, camera math, memoization and the render loop.

mod camera;
mod layer;
mod memo;
mod render;

use serde::{Deserialize, Serialize};

pub use camera::{Camera2D, CameraError};
pub use layer::{DrawContext, Layer, LayerError, LayerNode, LayerOutput, LayerRegistry, PrepareContext, Prepared};
pub use memo::{fingerprint, Fingerprint, MemoCache, MemoStats};
pub use render::{render, Frame, RenderError, RenderOutput, RenderParams, RenderStats, Renderer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Bitmap,
    Vector,
}
