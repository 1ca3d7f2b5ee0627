//! Seeded workloads shared by the benches.

use pluot_core::chunkstore::ArrayData;
use pluot_core::drawlist::PointColors;
use pluot_core::{DrawList, MemoryStore, Point, Primitive, Rgba8};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` screen positions spread over a `w` x `h` viewport.
pub fn screen_points(n: usize, w: u32, h: u32, seed: u64) -> Vec<Point> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| Point::new(r.random_range(0.0..w as f64), r.random_range(0.0..h as f64)))
        .collect()
}

pub fn points_draw_list(n: usize, w: u32, h: u32) -> DrawList {
    let mut dl = DrawList::new();
    dl.push(Primitive::Points {
        centers: screen_points(n, w, h, 1),
        radius_px: 2.0,
        colors: PointColors::Uniform(Rgba8::new(31, 119, 180, 200)),
    })
    .expect("valid primitive");
    dl
}

pub fn uniform_values(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| r.random::<f32>() as f64).collect()
}

/// A 2-D f32 array `path` of `side` x `side` with square chunks.
pub fn square_array(path: &str, side: u64, chunk: u64) -> MemoryStore {
    let data = ArrayData::F32((0..side * side).map(|i| i as f32).collect());
    let mut store = MemoryStore::new();
    store
        .insert_array(path, &[side, side], &[chunk, chunk], &data)
        .expect("valid array");
    store
}
