//! Deterministic sample arrays used by the bundled fixtures and the README
//! examples. Everything is computed from closed-form expressions so the
//! bytes are identical on every platform.

use pluot_core::chunkstore::{encode_array_metadata, encode_chunks, ArrayData};
use pluot_core::layers::encode_pyramid;
use pluot_core::StoreError;

pub const POINTS: usize = 2000;
pub const POINT_CHUNK: u64 = 256;
pub const VALUES: usize = 10_000;
pub const VALUE_CHUNK: u64 = 1024;
pub const IMAGE_SIZE: u64 = 128;
pub const IMAGE_TILE: u64 = 32;
pub const IMAGE_LEVELS: usize = 3;

fn array(path: &str, shape: &[u64], chunk: &[u64], data: ArrayData) -> Result<Vec<(String, Vec<u8>)>, StoreError> {
    let mut out = vec![(
        format!("{path}/zarr.json"),
        encode_array_metadata(shape, chunk, data.dtype()).into_bytes(),
    )];
    out.extend(encode_chunks(path, shape, chunk, &data)?);
    Ok(out)
}

/// Golden-angle spiral: `x`, `y` in roughly [-50, 50], `v` the radius.
pub fn spiral() -> (Vec<f32>, Vec<f32>, Vec<f32>) {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut xs = Vec::with_capacity(POINTS);
    let mut ys = Vec::with_capacity(POINTS);
    let mut vs = Vec::with_capacity(POINTS);
    for i in 0..POINTS {
        let r = 50.0 * ((i as f64 + 0.5) / POINTS as f64).sqrt();
        let a = i as f64 * golden;
        xs.push((r * a.cos()) as f32);
        ys.push((r * a.sin()) as f32);
        vs.push(r as f32);
    }
    (xs, ys, vs)
}

/// Bell-shaped values built from a sum of incommensurate sines.
pub fn bell() -> Vec<f32> {
    (0..VALUES)
        .map(|i| {
            let t = i as f64;
            let s = (t * 0.7548776662).sin() + (t * 0.5698402910).sin() + (t * 0.3819660113).sin();
            (10.0 + 2.0 * s) as f32
        })
        .collect()
}

/// Two-channel test card: a radial gradient and a checkerboard.
pub fn test_card() -> Vec<f32> {
    let n = IMAGE_SIZE as usize;
    let mut out = vec![0f32; 2 * n * n];
    for y in 0..n {
        for x in 0..n {
            let dx = x as f64 - n as f64 / 2.0;
            let dy = y as f64 - n as f64 / 2.0;
            out[y * n + x] = (1.0 - (dx * dx + dy * dy).sqrt() / n as f64).max(0.0) as f32;
            out[n * n + y * n + x] = (((x / 16) + (y / 16)) % 2) as f32;
        }
    }
    out
}

/// Every store entry of the fixture data directory, keyed relative to it.
pub fn entries() -> Result<Vec<(String, Vec<u8>)>, StoreError> {
    let (xs, ys, vs) = spiral();
    let n = POINTS as u64;
    let mut out = Vec::new();
    out.extend(array("points/x", &[n], &[POINT_CHUNK], ArrayData::F32(xs))?);
    out.extend(array("points/y", &[n], &[POINT_CHUNK], ArrayData::F32(ys))?);
    out.extend(array("points/v", &[n], &[POINT_CHUNK], ArrayData::F32(vs))?);
    let counts: Vec<i32> = (0..VALUES as i32).map(|i| (i * 7919) % 101).collect();
    out.extend(array(
        "values/bell",
        &[VALUES as u64],
        &[VALUE_CHUNK],
        ArrayData::F32(bell()),
    )?);
    out.extend(array(
        "values/ints",
        &[VALUES as u64],
        &[VALUE_CHUNK],
        ArrayData::I32(counts),
    )?);
    out.extend(encode_pyramid(
        "card",
        [2, IMAGE_SIZE, IMAGE_SIZE],
        &test_card(),
        IMAGE_LEVELS,
        [IMAGE_TILE, IMAGE_TILE],
    )?);
    Ok(out)
}

/// Writes [`entries`] under `dir`.
pub fn write_to(dir: &std::path::Path) -> std::io::Result<()> {
    for (key, bytes) in entries().map_err(std::io::Error::other)? {
        let path = dir.join(&key);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, bytes)?;
    }
    Ok(())
}
