//! Built-in layer kinds.

mod axis;
mod colormap;
mod histogram;
mod image;
mod primitives;
mod scatter;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chunkstore::{open_array, read_region, ArrayHandle, ArrayMeta, StoreRegistry};
use crate::geom::Point;
use crate::scene::{Camera2D, LayerError, LayerRegistry};

pub use axis::{axis_children, nice_ticks, tick_decimals, AxisLayer, AxisOrientation, AxisProps};
pub use colormap::Colormap;
pub use histogram::{histogram_draw, histogram_prepare, HistogramData, HistogramLayer, HistogramProps};
pub use image::{
    compose_channels, encode_pyramid, image_prepare, read_multiscale, select_level, tile_footprint, visible_tiles,
    ChannelSetting, ImageLayer, ImageProps, ImageTile, Multiscale,
};
pub use primitives::{BarLayer, BarProps, LineLayer, LineProps, TextLayer, TextProps};
pub use scatter::{scatter_draw, scatter_prepare, ScatterLayer, ScatterPrepared, ScatterProps};

/// Registers scatter, image, histogram, axis, line, text and bar.
pub fn register_builtins(reg: &mut LayerRegistry) {
    reg.register("scatter", Arc::new(ScatterLayer));
    reg.register("image", Arc::new(ImageLayer));
    reg.register("histogram", Arc::new(HistogramLayer));
    reg.register("axis", Arc::new(AxisLayer));
    reg.register("line", Arc::new(LineLayer));
    reg.register("text", Arc::new(TextLayer));
    reg.register("bar", Arc::new(BarLayer));
}

/// Coordinate space of primitive layer positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coords {
    #[default]
    World,
    Screen,
}

impl Coords {
    pub fn to_screen(self, camera: &Camera2D, p: Point) -> Point {
        match self {
            Coords::World => camera.world_to_screen(p),
            Coords::Screen => p,
        }
    }
}

/// Opens a 1-D array and reads `[start, end)` of it as f64.
pub(crate) fn read_column(
    registry: &StoreRegistry,
    handle: &ArrayHandle,
    range: Option<[u64; 2]>,
    floats_only: bool,
) -> Result<(ArrayMeta, Vec<f64>), LayerError> {
    let meta = open_array(registry, handle)?;
    if meta.rank() != 1 {
        return Err(LayerError::Data(format!(
            "{}/{} must be 1-D, has shape {:?}",
            handle.store, handle.path, meta.shape
        )));
    }
    if floats_only && !meta.dtype.is_float() {
        return Err(LayerError::Data(format!(
            "{}/{} has dtype {}, expected float32 or float64",
            handle.store,
            handle.path,
            meta.dtype.zarr_name()
        )));
    }
    let n = meta.shape[0];
    let (start, end) = match range {
        Some([s, e]) => (s.min(n), e.min(n).max(s.min(n))),
        None => (0, n),
    };
    let data = read_region(registry, handle, &meta, &[start], &[end - start])?;
    Ok((meta, data.to_f64()))
}
