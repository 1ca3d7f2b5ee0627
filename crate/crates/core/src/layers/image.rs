use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::chunkstore::{
    encode_array_metadata, encode_chunks, join_key, open_array, read_region, ArrayData, ArrayHandle, ArrayMeta, DType,
    StoreError, StoreRegistry,
};
use crate::drawlist::{ImageData, Primitive, RectPx, Rgba8, Sampling};
use crate::geom::{Bounds, Point};
use crate::scene::{Camera2D, DrawContext, Layer, LayerError, LayerNode, LayerOutput, PrepareContext, Prepared};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSetting {
    pub channel_index: usize,
    pub color: Rgba8,
    pub contrast: [f64; 2],
}

fn default_tile_capacity() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageProps {
    pub group: ArrayHandle,
    pub channels: Vec<ChannelSetting>,
    #[serde(default = "default_tile_capacity")]
    pub tile_cache_capacity: usize,
}

impl ImageProps {
    pub fn validate(&self) -> Result<(), LayerError> {
        if self.channels.is_empty() {
            return Err(LayerError::Props("image needs at least one channel".into()));
        }
        for (i, c) in self.channels.iter().enumerate() {
            let [lo, hi] = c.contrast;
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(LayerError::Props(format!(
                    "channels[{i}].contrast needs lo < hi, got [{lo}, {hi}]"
                )));
            }
        }
        if self.tile_cache_capacity == 0 {
            return Err(LayerError::Props("tile_cache_capacity must be >= 1".into()));
        }
        Ok(())
    }
}

/// Contents of `<group>/multiscale.json`: level paths, finest first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiscale {
    pub levels: Vec<String>,
}

pub fn read_multiscale(registry: &StoreRegistry, group: &ArrayHandle) -> Result<Multiscale, StoreError> {
    let key = group.key("multiscale.json");
    let bytes = registry.fetch(&group.store, &key)?;
    let ms: Multiscale = serde_json::from_slice(&bytes).map_err(|e| StoreError::InvalidMetadata {
        key: key.clone(),
        reason: e.to_string(),
    })?;
    if ms.levels.is_empty() {
        return Err(StoreError::InvalidMetadata {
            key,
            reason: "no levels".into(),
        });
    }
    Ok(ms)
}

/// Store entries for a pyramid group at `path` built from a base image of
/// shape `[channels, height, width]` (C-order). Each further level halves
/// the previous one with 2x2 means (edge texels average what exists).
pub fn encode_pyramid(
    path: &str,
    shape: [u64; 3],
    base: &[f32],
    n_levels: usize,
    tile: [u64; 2],
) -> Result<Vec<(String, Vec<u8>)>, StoreError> {
    let [c, mut h, mut w] = shape;
    if base.len() as u64 != c * h * w || n_levels == 0 {
        return Err(StoreError::OutOfBounds {
            reason: format!(
                "pyramid base has {} elements for shape {:?} and {} levels",
                base.len(),
                shape,
                n_levels
            ),
        });
    }
    let levels: Vec<String> = (0..n_levels).map(|l| l.to_string()).collect();
    let mut out = vec![(
        join_key(path, "multiscale.json"),
        serde_json::to_vec(&Multiscale { levels: levels.clone() }).expect("serializable"),
    )];
    let mut data = base.to_vec();
    for (l, name) in levels.iter().enumerate() {
        if l > 0 {
            let (nh, nw) = (h.div_ceil(2), w.div_ceil(2));
            let mut next = vec![0f32; (c * nh * nw) as usize];
            for ch in 0..c {
                for y in 0..nh {
                    for x in 0..nw {
                        let (mut sum, mut n) = (0f64, 0u32);
                        for (yy, xx) in [
                            (2 * y, 2 * x),
                            (2 * y, 2 * x + 1),
                            (2 * y + 1, 2 * x),
                            (2 * y + 1, 2 * x + 1),
                        ] {
                            if yy < h && xx < w {
                                sum += data[(ch * h * w + yy * w + xx) as usize] as f64;
                                n += 1;
                            }
                        }
                        next[(ch * nh * nw + y * nw + x) as usize] = (sum / n as f64) as f32;
                    }
                }
            }
            (h, w, data) = (nh, nw, next);
        }
        let level_path = join_key(path, name);
        let lshape = [c, h, w];
        let chunks = [1, tile[0].min(h).max(1), tile[1].min(w).max(1)];
        out.push((
            join_key(&level_path, "zarr.json"),
            encode_array_metadata(&lshape, &chunks, DType::F32).into_bytes(),
        ));
        out.extend(encode_chunks(
            &level_path,
            &lshape,
            &chunks,
            &ArrayData::F32(data.clone()),
        )?);
    }
    Ok(out)
}

/// Pyramid level to draw at `zoom` screen pixels per base texel:
/// `clamp(floor(log2(1 / zoom)), 0, n_levels - 1)`.
pub fn select_level(zoom: f64, n_levels: usize) -> usize {
    let l = (1.0 / zoom).log2().floor();
    l.clamp(0.0, n_levels.saturating_sub(1) as f64) as usize
}

/// World rectangle covered by tile `(ty, tx)` of `level`. The base image's
/// top-left corner sits at the world origin with rows running toward -y and
/// one world unit per base texel.
pub fn tile_footprint(level: usize, tile_shape: [u64; 2], level_shape: [u64; 2], ty: u64, tx: u64) -> Bounds {
    let s = (1u64 << level) as f64;
    let [th, tw] = tile_shape;
    let [h, w] = level_shape;
    let x0 = (tx * tw) as f64 * s;
    let x1 = ((tx + 1) * tw).min(w) as f64 * s;
    let y0 = (ty * th) as f64 * s;
    let y1 = ((ty + 1) * th).min(h) as f64 * s;
    Bounds::new(Point::new(x0, -y1), Point::new(x1, -y0))
}

/// Tiles `(ty, tx)` of a level whose footprint overlaps the camera's
/// visible world rectangle (positive-area overlap), row-major.
pub fn visible_tiles(camera: &Camera2D, level: usize, tile_shape: [u64; 2], level_shape: [u64; 2]) -> Vec<(u64, u64)> {
    let [th, tw] = tile_shape;
    let [h, w] = level_shape;
    if th == 0 || tw == 0 || h == 0 || w == 0 {
        return Vec::new();
    }
    let (nty, ntx) = (h.div_ceil(th), w.div_ceil(tw));
    let view = camera.visible_world();
    let s = (1u64 << level) as f64;
    // Candidate ranges padded by one tile; the exact test below decides.
    let range = |lo: f64, hi: f64, size: f64, n: u64| -> (u64, u64) {
        let a = (lo / size).floor() - 1.0;
        let b = (hi / size).floor() + 1.0;
        let last = (n - 1) as f64;
        (a.clamp(0.0, last) as u64, b.clamp(0.0, last) as u64)
    };
    let (tx0, tx1) = range(view.min.x, view.max.x, tw as f64 * s, ntx);
    let (ty0, ty1) = range(-view.max.y, -view.min.y, th as f64 * s, nty);
    let mut out = Vec::new();
    for ty in ty0..=ty1 {
        for tx in tx0..=tx1 {
            if tile_footprint(level, tile_shape, level_shape, ty, tx).overlaps(&view) {
                out.push((ty, tx));
            }
        }
    }
    out
}

/// Pseudocolors one tile: each channel is normalized through its contrast
/// limits, weighted by its color and summed, then rounded half up and
/// clamped. Alpha is always 255.
pub fn compose_channels(tiles: &[&[f64]], contrasts: &[[f64; 2]], colors: &[Rgba8]) -> Result<Vec<u8>, LayerError> {
    if tiles.len() != contrasts.len() || tiles.len() != colors.len() {
        return Err(LayerError::Data(format!(
            "{} channel tiles, {} contrasts and {} colors",
            tiles.len(),
            contrasts.len(),
            colors.len()
        )));
    }
    let n = tiles.first().map_or(0, |t| t.len());
    if let Some(bad) = tiles.iter().find(|t| t.len() != n) {
        return Err(LayerError::Data(format!(
            "channel tiles differ in size: {} vs {}",
            n,
            bad.len()
        )));
    }
    let mut out = vec![0u8; 4 * n];
    let mut acc = [0.0f64; 3];
    for (p, px) in out.chunks_exact_mut(4).enumerate() {
        acc.fill(0.0);
        for ((tile, &[lo, hi]), color) in tiles.iter().zip(contrasts).zip(colors) {
            let norm = ((tile[p] - lo) / (hi - lo)).clamp(0.0, 1.0);
            let norm = if norm.is_nan() { 0.0 } else { norm };
            acc[0] += color.r as f64 * norm;
            acc[1] += color.g as f64 * norm;
            acc[2] += color.b as f64 * norm;
        }
        for k in 0..3 {
            px[k] = (acc[k] + 0.5).floor().clamp(0.0, 255.0) as u8;
        }
        px[3] = 255;
    }
    Ok(out)
}

/// One composed tile ready to blit.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageTile {
    pub level: usize,
    pub tile: (u64, u64),
    pub dest: RectPx,
    pub image: ImageData,
    pub sampling: Sampling,
}

fn level_meta(registry: &StoreRegistry, handle: &ArrayHandle, props: &ImageProps) -> Result<ArrayMeta, LayerError> {
    let meta = open_array(registry, handle)?;
    if meta.rank() != 3 {
        return Err(LayerError::Data(format!(
            "pyramid level {} must have shape [channels, height, width], got {:?}",
            handle.path, meta.shape
        )));
    }
    if let Some(c) = props.channels.iter().find(|c| c.channel_index as u64 >= meta.shape[0]) {
        return Err(LayerError::Props(format!(
            "channel_index {} out of range for {} channels",
            c.channel_index, meta.shape[0]
        )));
    }
    Ok(meta)
}

/// Picks the level for the camera, then reads and composes just the
/// visible tiles. Raw channel tiles and composed tiles both live in
/// bounded memo groups, so a contrast change recomposes without fetching.
pub fn image_prepare(props: &ImageProps, ctx: &mut PrepareContext<'_>) -> Result<Vec<ImageTile>, LayerError> {
    props.validate()?;
    let registry = ctx.registry;
    let camera = *ctx.camera;
    let group = &props.group;
    let ms: Arc<Multiscale> = ctx.memo("multiscale", group, || read_multiscale(registry, group))?;
    let level = select_level(camera.zoom(), ms.levels.len());
    let handle = group.child(&ms.levels[level]);
    let meta: Arc<ArrayMeta> = ctx.memo(&format!("meta/{level}"), &handle, || {
        level_meta(registry, &handle, props)
    })?;

    let level_shape = [meta.shape[1], meta.shape[2]];
    let tile_shape = [meta.chunk_shape[1], meta.chunk_shape[2]];
    let scale = (1u64 << level) as f64;
    let sampling = if camera.zoom() * scale >= 1.0 {
        Sampling::Nearest
    } else {
        Sampling::Bilinear
    };
    let capacity = props.tile_cache_capacity;
    let raw_capacity = capacity.saturating_mul(props.channels.len());
    let contrasts: Vec<[f64; 2]> = props.channels.iter().map(|c| c.contrast).collect();
    let colors: Vec<Rgba8> = props.channels.iter().map(|c| c.color).collect();

    let mut out = Vec::new();
    for (ty, tx) in visible_tiles(&camera, level, tile_shape, level_shape) {
        let y0 = ty * tile_shape[0];
        let x0 = tx * tile_shape[1];
        let th = tile_shape[0].min(level_shape[0] - y0);
        let tw = tile_shape[1].min(level_shape[1] - x0);
        let composed_key = format!("tile/{level}/{ty}/{tx}");
        let composed_deps = (&handle, &props.channels);
        let image = match ctx.memo_peek::<ImageData, _>(&composed_key, &composed_deps) {
            Some(img) => img,
            None => {
                let mut raws = Vec::with_capacity(props.channels.len());
                for c in &props.channels {
                    let key = format!("raw/{level}/{ty}/{tx}/{}", c.channel_index);
                    let meta = &meta;
                    let handle = &handle;
                    let raw: Arc<Vec<f64>> = ctx.memo_bounded("raw", raw_capacity, &key, handle, || {
                        read_region(registry, handle, meta, &[c.channel_index as u64, y0, x0], &[1, th, tw])
                            .map(|d| d.to_f64())
                            .map_err(LayerError::from)
                    })?;
                    raws.push(raw);
                }
                ctx.memo_bounded("tiles", capacity, &composed_key, &composed_deps, || {
                    let slices: Vec<&[f64]> = raws.iter().map(|r| r.as_slice()).collect();
                    let rgba = compose_channels(&slices, &contrasts, &colors)?;
                    ImageData::new(tw as u32, th as u32, rgba).map_err(LayerError::from)
                })?
            }
        };
        let fp = tile_footprint(level, tile_shape, level_shape, ty, tx);
        let a = camera.world_to_screen(Point::new(fp.min.x, fp.max.y));
        let b = camera.world_to_screen(Point::new(fp.max.x, fp.min.y));
        out.push(ImageTile {
            level,
            tile: (ty, tx),
            dest: RectPx::new(a.x, a.y, b.x - a.x, b.y - a.y),
            image: (*image).clone(),
            sampling,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ImageLayer;

impl Layer for ImageLayer {
    fn prepare(&self, node: &LayerNode, ctx: &mut PrepareContext<'_>) -> Result<Prepared, LayerError> {
        let props: ImageProps = node.props()?;
        Ok(Box::new(image_prepare(&props, ctx)?))
    }

    fn draw(
        &self,
        _: &LayerNode,
        prepared: Prepared,
        _: &DrawContext<'_>,
        out: &mut LayerOutput,
    ) -> Result<(), LayerError> {
        let tiles = *prepared
            .downcast::<Vec<ImageTile>>()
            .expect("image draw receives its own prepare output");
        out.primitives.extend(tiles.into_iter().map(|t| Primitive::ImageBlit {
            dest: t.dest,
            source: t.image,
            sampling: t.sampling,
        }));
        Ok(())
    }
}
