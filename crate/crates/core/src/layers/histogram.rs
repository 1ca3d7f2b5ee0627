use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chunkstore::{open_array, read_region, ArrayHandle, StoreRegistry};
use crate::compute::{bin_edges, ComputeBackend, ComputeError};
use crate::drawlist::{Primitive, RectPx, Rgba8};
use crate::geom::Point;
use crate::scene::{Camera2D, DrawContext, Layer, LayerError, LayerNode, LayerOutput, PrepareContext, Prepared};

fn default_bar_color() -> Rgba8 {
    Rgba8::opaque(70, 130, 180)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramProps {
    pub values: ArrayHandle,
    pub n_bins: usize,
    #[serde(default = "default_bar_color")]
    pub bar_color: Rgba8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramData {
    /// `n_bins + 1` edges in data units.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Extent then bin counts over a whole 1-D array. A constant input gets
/// the extent `[v - 0.5, v + 0.5]`.
pub fn histogram_prepare(
    values: &ArrayHandle,
    n_bins: usize,
    registry: &StoreRegistry,
    compute: &dyn ComputeBackend,
) -> Result<HistogramData, LayerError> {
    if n_bins == 0 {
        return Err(ComputeError::ZeroBins.into());
    }
    let meta = open_array(registry, values)?;
    if meta.rank() != 1 {
        return Err(LayerError::Data(format!(
            "{}/{} must be 1-D, has shape {:?}",
            values.store, values.path, meta.shape
        )));
    }
    let data = read_region(registry, values, &meta, &[0], &meta.shape)?.to_f64();
    let (mut lo, mut hi) = compute.extent(&data)?;
    if lo == hi {
        (lo, hi) = (lo - 0.5, lo + 0.5);
    }
    let counts = compute.bin_counts(&data, lo, hi, n_bins)?;
    Ok(HistogramData {
        edges: bin_edges(lo, hi, n_bins),
        counts,
    })
}

/// One bar per bin spanning its edges in world x, standing on the bottom of
/// the viewport, with the tallest bar filling the viewport height.
pub fn histogram_draw(data: &HistogramData, camera: &Camera2D, color: Rgba8) -> Primitive {
    let h = camera.height_px() as f64;
    let max = data.counts.iter().copied().max().unwrap_or(0);
    let rects = data
        .counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let x0 = camera.world_to_screen(Point::new(data.edges[i], 0.0)).x;
            let x1 = camera.world_to_screen(Point::new(data.edges[i + 1], 0.0)).x;
            let bar = if max == 0 { 0.0 } else { c as f64 / max as f64 * h };
            RectPx::new(x0, h - bar, x1 - x0, bar)
        })
        .collect();
    Primitive::Rects { rects, color }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct HistogramLayer;

impl Layer for HistogramLayer {
    fn prepare(&self, node: &LayerNode, ctx: &mut PrepareContext<'_>) -> Result<Prepared, LayerError> {
        let props: HistogramProps = node.props()?;
        let (registry, compute) = (ctx.registry, ctx.compute);
        let data: Arc<HistogramData> = ctx.memo("histogram", &(&props.values, props.n_bins), || {
            histogram_prepare(&props.values, props.n_bins, registry, compute)
        })?;
        Ok(Box::new((data, props.bar_color)))
    }

    fn draw(
        &self,
        _: &LayerNode,
        prepared: Prepared,
        ctx: &DrawContext<'_>,
        out: &mut LayerOutput,
    ) -> Result<(), LayerError> {
        let (data, color) = *prepared
            .downcast::<(Arc<HistogramData>, Rgba8)>()
            .expect("histogram draw receives its own prepare output");
        out.primitives.push(histogram_draw(&data, ctx.camera, color));
        Ok(())
    }
}
