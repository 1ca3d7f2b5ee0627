use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use super::{
    Camera2D, DrawContext, LayerError, LayerNode, LayerOutput, LayerRegistry, MemoCache, OutputKind, PrepareContext,
};
use crate::chunkstore::StoreRegistry;
use crate::compute::{ComputeBackend, CpuBackend};
use crate::drawlist::{
    encode_png, rasterize_with_fallback, to_svg, DrawList, PngError, PrimitiveCounts, RasterBackend, Rgba8,
};
use crate::interact::PickIndex;

/// Output surface description. Layer props are in logical pixels; the
/// bitmap backing store is `width_px * device_pixel_ratio` wide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderParams {
    pub width_px: u32,
    pub height_px: u32,
    pub device_pixel_ratio: f64,
    pub background: Rgba8,
    pub output: OutputKind,
}

impl RenderParams {
    pub fn new(width_px: u32, height_px: u32, output: OutputKind) -> Self {
        Self {
            width_px,
            height_px,
            device_pixel_ratio: 1.0,
            background: Rgba8::WHITE,
            output,
        }
    }

    pub fn with_background(mut self, background: Rgba8) -> Self {
        self.background = background;
        self
    }

    pub fn with_device_pixel_ratio(mut self, dpr: f64) -> Self {
        self.device_pixel_ratio = dpr;
        self
    }

    pub fn validate(&self) -> Result<(), RenderError> {
        let invalid = |m: String| Err(RenderError::InvalidParams(m));
        if self.width_px == 0 || self.height_px == 0 {
            return invalid(format!(
                "size must be at least 1x1, got {}x{}",
                self.width_px, self.height_px
            ));
        }
        let dpr = self.device_pixel_ratio;
        if !(dpr.is_finite() && dpr >= 1.0) {
            return invalid(format!("device_pixel_ratio must be finite and >= 1, got {dpr}"));
        }
        for (name, v) in [("width", self.width_px), ("height", self.height_px)] {
            let scaled = v as f64 * dpr;
            if scaled.fract() != 0.0 || scaled > u32::MAX as f64 {
                return invalid(format!(
                    "{name} {v} * device_pixel_ratio {dpr} is not an integer pixel count"
                ));
            }
        }
        Ok(())
    }

    /// Bitmap size in physical pixels.
    pub fn backing_size(&self) -> (u32, u32) {
        (
            (self.width_px as f64 * self.device_pixel_ratio) as u32,
            (self.height_px as f64 * self.device_pixel_ratio) as u32,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RenderOutput {
    Bitmap {
        width_px: u32,
        height_px: u32,
        pixels: Vec<u8>,
    },
    Vector {
        svg: String,
    },
}

impl RenderOutput {
    /// PNG bytes for bitmaps, UTF-8 SVG for vectors.
    pub fn encode(&self) -> Result<Vec<u8>, PngError> {
        match self {
            RenderOutput::Bitmap {
                width_px,
                height_px,
                pixels,
            } => encode_png(*width_px, *height_px, pixels),
            RenderOutput::Vector { svg } => Ok(svg.clone().into_bytes()),
        }
    }

    pub fn content_type(&self) -> &'static str {
        match self {
            RenderOutput::Bitmap { .. } => "image/png",
            RenderOutput::Vector { .. } => "image/svg+xml",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("invalid render params: {0}")]
    InvalidParams(String),
    #[error("duplicate layer id {0:?}")]
    DuplicateLayerId(String),
    #[error("layer {layer_id:?}: unknown layer kind {kind:?}")]
    UnknownLayerKind { layer_id: String, kind: String },
    #[error("layer {layer_id:?}: {source}")]
    Layer {
        layer_id: String,
        #[source]
        source: LayerError,
    },
}

impl RenderError {
    pub fn is_not_found(&self) -> bool {
        matches!(self, RenderError::Layer { source, .. } if source.is_not_found())
    }

    /// True for failures caused by data access rather than by the scene
    /// description itself.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            RenderError::Layer {
                source: LayerError::Store(_) | LayerError::Compute(_) | LayerError::Data(_),
                ..
            }
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RenderStats {
    /// Store fetches issued during this render.
    pub fetches: usize,
    /// `prepare` calls, one per layer visited (generated children included).
    pub prepares: usize,
}

/// A render result plus the bookkeeping interactive hosts need.
#[derive(Debug)]
pub struct Frame {
    pub output: RenderOutput,
    pub draw_list: DrawList,
    pub stats: RenderStats,
    pub picks: Vec<PickIndex>,
}

impl Frame {
    pub fn counts(&self) -> PrimitiveCounts {
        self.draw_list.counts()
    }
}

/// Layer kinds plus the compute and raster backends a render uses.
#[derive(Clone)]
pub struct Renderer {
    layers: LayerRegistry,
    compute: Arc<dyn ComputeBackend>,
    raster: Option<Arc<dyn RasterBackend>>,
}

impl Default for Renderer {
    fn default() -> Self {
        Self {
            layers: LayerRegistry::with_builtins(),
            compute: Arc::new(CpuBackend),
            raster: None,
        }
    }
}

struct Traversal<'a> {
    renderer: &'a Renderer,
    camera: &'a Camera2D,
    params: &'a RenderParams,
    registry: &'a StoreRegistry,
    cache: &'a mut MemoCache,
    seen: HashSet<String>,
    draw_list: DrawList,
    picks: Vec<PickIndex>,
    prepares: usize,
}

impl Traversal<'_> {
    fn visit(&mut self, node: &LayerNode) -> Result<(), RenderError> {
        if !self.seen.insert(node.id.clone()) {
            return Err(RenderError::DuplicateLayerId(node.id.clone()));
        }
        let layer = self
            .renderer
            .layers
            .get(&node.kind)
            .ok_or_else(|| RenderError::UnknownLayerKind {
                layer_id: node.id.clone(),
                kind: node.kind.clone(),
            })?
            .clone();
        let attribute = |source: LayerError| RenderError::Layer {
            layer_id: node.id.clone(),
            source,
        };

        let mut ctx = PrepareContext::new(
            self.camera,
            self.params,
            self.registry,
            self.renderer.compute.as_ref(),
            &node.id,
            self.cache,
        );
        let prepared = layer.prepare(node, &mut ctx).map_err(attribute)?;
        self.prepares += 1;

        let dctx = DrawContext {
            camera: self.camera,
            params: self.params,
            output: self.params.output,
            layer_id: &node.id,
        };
        let mut out = LayerOutput::default();
        layer.draw(node, prepared, &dctx, &mut out).map_err(attribute)?;
        for p in out.primitives {
            self.draw_list
                .push(p)
                .map_err(|e| attribute(LayerError::Primitive(e)))?;
        }
        if let Some(pick) = out.pick {
            self.picks.push(pick);
        }
        for child in out.children.iter().chain(&node.children) {
            self.visit(child)?;
        }
        Ok(())
    }
}

fn check_scene(renderer: &Renderer, nodes: &[LayerNode], seen: &mut HashSet<String>) -> Result<(), RenderError> {
    for n in nodes {
        if !seen.insert(n.id.clone()) {
            return Err(RenderError::DuplicateLayerId(n.id.clone()));
        }
        if renderer.layers.get(&n.kind).is_none() {
            return Err(RenderError::UnknownLayerKind {
                layer_id: n.id.clone(),
                kind: n.kind.clone(),
            });
        }
        check_scene(renderer, &n.children, seen)?;
    }
    Ok(())
}

impl Renderer {
    pub fn new(layers: LayerRegistry, compute: Arc<dyn ComputeBackend>) -> Self {
        Self {
            layers,
            compute,
            raster: None,
        }
    }

    /// Preferred raster backend; the CPU rasterizer remains the fallback.
    pub fn with_raster_backend(mut self, backend: Arc<dyn RasterBackend>) -> Self {
        self.raster = Some(backend);
        self
    }

    pub fn with_compute_backend(mut self, compute: Arc<dyn ComputeBackend>) -> Self {
        self.compute = compute;
        self
    }

    pub fn layers(&self) -> &LayerRegistry {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut LayerRegistry {
        &mut self.layers
    }

    pub fn render(
        &self,
        scene: &[LayerNode],
        camera: &Camera2D,
        params: &RenderParams,
        registry: &StoreRegistry,
        cache: &mut MemoCache,
    ) -> Result<RenderOutput, RenderError> {
        self.render_frame(scene, camera, params, registry, cache)
            .map(|f| f.output)
    }

    /// Runs prepare then draw for every layer depth-first, in order, and
    /// hands the resulting draw list to the backend `params.output` selects.
    pub fn render_frame(
        &self,
        scene: &[LayerNode],
        camera: &Camera2D,
        params: &RenderParams,
        registry: &StoreRegistry,
        cache: &mut MemoCache,
    ) -> Result<Frame, RenderError> {
        params.validate()?;
        if (camera.width_px(), camera.height_px()) != (params.width_px, params.height_px) {
            return Err(RenderError::InvalidParams(format!(
                "camera viewport {}x{} does not match output size {}x{}",
                camera.width_px(),
                camera.height_px(),
                params.width_px,
                params.height_px
            )));
        }
        check_scene(self, scene, &mut HashSet::new())?;

        let fetches_before = registry.fetch_count();
        let mut t = Traversal {
            renderer: self,
            camera,
            params,
            registry,
            cache,
            seen: HashSet::new(),
            draw_list: DrawList::new(),
            picks: Vec::new(),
            prepares: 0,
        };
        for node in scene {
            t.visit(node)?;
        }
        let (draw_list, picks, prepares) = (t.draw_list, t.picks, t.prepares);

        let output = match params.output {
            OutputKind::Bitmap => {
                let (w, h) = params.backing_size();
                let scaled;
                let dl = if params.device_pixel_ratio == 1.0 {
                    &draw_list
                } else {
                    scaled = draw_list.scaled(params.device_pixel_ratio);
                    &scaled
                };
                let pixels = rasterize_with_fallback(self.raster.as_deref(), dl, w, h, params.background);
                RenderOutput::Bitmap {
                    width_px: w,
                    height_px: h,
                    pixels,
                }
            }
            OutputKind::Vector => RenderOutput::Vector {
                svg: to_svg(&draw_list, params.width_px, params.height_px, params.background),
            },
        };
        Ok(Frame {
            output,
            draw_list,
            stats: RenderStats {
                fetches: registry.fetch_count().saturating_sub(fetches_before),
                prepares,
            },
            picks,
        })
    }
}

/// Renders with the built-in layers and the CPU backends.
pub fn render(
    scene: &[LayerNode],
    camera: &Camera2D,
    params: &RenderParams,
    registry: &StoreRegistry,
    cache: &mut MemoCache,
) -> Result<RenderOutput, RenderError> {
    Renderer::default().render(scene, camera, params, registry, cache)
}
