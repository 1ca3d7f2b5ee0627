//! Raster backend contract. The CPU rasterizer is always available; other
//! backends (for example a GPU device) report [`RasterError::DeviceUnavailable`]
//! when they cannot run, and callers fall back to the CPU path.

use thiserror::Error;

use super::{rasterize, DrawList, Rgba8};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RasterError {
    #[error("raster device unavailable: {0}")]
    DeviceUnavailable(String),
}

pub trait RasterBackend: Send + Sync {
    fn name(&self) -> &str;

    fn rasterize(&self, dl: &DrawList, width: u32, height: u32, background: Rgba8) -> Result<Vec<u8>, RasterError>;
}

/// The deterministic reference rasterizer.
#[derive(Debug, Clone, Copy, Default)]
pub struct CpuRasterizer;

impl RasterBackend for CpuRasterizer {
    fn name(&self) -> &str {
        "cpu"
    }

    fn rasterize(&self, dl: &DrawList, width: u32, height: u32, background: Rgba8) -> Result<Vec<u8>, RasterError> {
        Ok(rasterize(dl, width, height, background))
    }
}

/// Tries `preferred` first and falls back to the CPU rasterizer when it
/// reports that its device is unavailable.
pub fn rasterize_with_fallback(
    preferred: Option<&dyn RasterBackend>,
    dl: &DrawList,
    width: u32,
    height: u32,
    background: Rgba8,
) -> Vec<u8> {
    if let Some(backend) = preferred {
        match backend.rasterize(dl, width, height, background) {
            Ok(px) => return px,
            Err(RasterError::DeviceUnavailable(_)) => {}
        }
    }
    rasterize(dl, width, height, background)
}
