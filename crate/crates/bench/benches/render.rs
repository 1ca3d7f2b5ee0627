use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use pluot_bench::{points_draw_list, screen_points};
use pluot_core::drawlist::{encode_png, rasterize, to_svg};
use pluot_core::interact::build_pick_index;
use pluot_core::{Point, Rgba8};

fn raster(c: &mut Criterion) {
    let mut g = c.benchmark_group("rasterize");
    g.sample_size(10);
    let dl = points_draw_list(1_000_000, 800, 600);
    g.bench_function("1M points 800x600", |b| {
        b.iter(|| rasterize(black_box(&dl), 800, 600, Rgba8::WHITE))
    });
    let pixels = rasterize(&dl, 800, 600, Rgba8::WHITE);
    g.bench_function("png encode 800x600", |b| {
        b.iter(|| encode_png(800, 600, black_box(&pixels)))
    });
    g.finish();
}

fn svg(c: &mut Criterion) {
    let dl = points_draw_list(10_000, 800, 600);
    c.bench_function("svg 10k points", |b| {
        b.iter(|| to_svg(black_box(&dl), 800, 600, Rgba8::WHITE))
    });
}

fn pick(c: &mut Criterion) {
    let pts = screen_points(1_000_000, 800, 600, 2);
    c.bench_function("pick index build 1M", |b| {
        b.iter(|| build_pick_index(black_box(&pts), 3.0, 800, 600))
    });
    let index = build_pick_index(&pts, 3.0, 800, 600);
    let cursors = screen_points(1024, 800, 600, 3);
    c.bench_function("pick 1024 queries over 1M", |b| {
        b.iter(|| cursors.iter().filter_map(|&p: &Point| index.pick(p, 5.0)).count())
    });
}

criterion_group!(benches, raster, svg, pick);
criterion_main!(benches);
