//! Property tests for the engine's invariants, each against an
//! independent brute-force oracle.

use std::collections::BTreeSet;
use std::sync::Arc;

use pluot_core::chunkstore::{chunk_key, chunks_for_region, read_region, ArrayData, ArrayMeta, DType, MemoryStore};
use pluot_core::drawlist::{rasterize, to_svg, PointColors, RectPx};
use pluot_core::interact::PickIndex;
use pluot_core::scene::MemoCache;
use pluot_core::{
    ArrayHandle, Camera2D, DrawList, LayerNode, OutputKind, Point, Primitive, RenderParams, Renderer, Rgba8,
    StoreRegistry,
};
use proptest::prelude::*;

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.log10()..hi.log10()).prop_map(|e| 10f64.powf(e))
}

fn camera() -> impl Strategy<Value = Camera2D> {
    (
        -1e3..1e3f64,
        -1e3..1e3f64,
        log_uniform(1e-6, 1e6),
        1u32..2000,
        1u32..2000,
    )
        .prop_map(|(x, y, z, w, h)| Camera2D::new(Point::new(x, y), z, w, h).unwrap())
}

fn max_abs(p: Point) -> f64 {
    p.x.abs().max(p.y.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn screen_world_round_trip(cam in camera(), fx in 0.0..1.0f64, fy in 0.0..1.0f64) {
        let p = Point::new(fx * cam.width_px() as f64, fy * cam.height_px() as f64);
        let w = cam.screen_to_world(p);
        let back = cam.world_to_screen(w);
        let err_world = back.distance(p) / cam.zoom();
        prop_assert!(err_world <= 1e-9 * max_abs(w), "err {err_world} at world {w:?}");

        let w2 = cam.screen_to_world(cam.world_to_screen(w));
        prop_assert!(w2.distance(w) <= 1e-9 * max_abs(w));
    }

    /// One zoom step changes zoom by at most 1000x either way and stays in
    /// [1e-6, 1e6]. Much larger single steps far from the origin exceed what
    /// f64 can resolve at 1e-6 px.
    #[test]
    fn zoom_about_keeps_anchor(cam in camera(), fx in 0.0..1.0f64, fy in 0.0..1.0f64, f in log_uniform(1e-3, 1e3)) {
        let f = (cam.zoom() * f).clamp(1e-6, 1e6) / cam.zoom();
        let a = Point::new(fx * cam.width_px() as f64, fy * cam.height_px() as f64);
        let under = cam.screen_to_world(a);
        let z = cam.zoom_about(a, f).unwrap();
        prop_assert!(z.world_to_screen(under).distance(a) < 1e-6);
    }

    #[test]
    fn pan_moves_center_by_screen_delta(cam in camera(), dx in -500.0..500.0f64, dy in -500.0..500.0f64) {
        let p = cam.pan(dx, dy);
        prop_assert!((p.center().x - (cam.center().x - dx / cam.zoom())).abs() <= 1e-9 * max_abs(p.center()));
        prop_assert!((p.center().y - (cam.center().y + dy / cam.zoom())).abs() <= 1e-9 * max_abs(p.center()));
    }
}

/// Points on a coarse lattice so exact distance ties actually happen.
fn points_and_cursor() -> impl Strategy<Value = (Vec<Point>, f64, Point, f64)> {
    (
        prop::collection::vec((-20i32..220, -20i32..170), 0..120),
        prop_oneof![Just(0.0), 0.5..12.0f64],
        (-30i32..230, -30i32..180),
        0.0..25.0f64,
    )
        .prop_map(|(pts, r, (cx, cy), md)| {
            (
                pts.into_iter()
                    .map(|(x, y)| Point::new(x as f64 / 2.0, y as f64 / 2.0))
                    .collect(),
                r,
                Point::new(cx as f64 / 2.0, cy as f64 / 2.0),
                md,
            )
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn pick_matches_brute_force((points, r, cursor, max_dist) in points_and_cursor()) {
        let mut idx = PickIndex::new("s", 100, 75, r);
        for (i, &p) in points.iter().enumerate() {
            idx.insert(i, p, p);
        }
        let reach = max_dist.max(r);
        let mut best: Option<(f64, usize)> = None;
        for (i, p) in points.iter().enumerate() {
            let d = p.distance(cursor);
            if d <= reach && best.is_none_or(|(bd, _)| d <= bd) {
                best = Some((d, i));
            }
        }
        let got = idx.pick(cursor, max_dist).map(|r| (r.distance_px, r.datum_index));
        prop_assert_eq!(got, best);
    }

    #[test]
    fn index_membership_is_disc_cell_overlap((points, r, _, _) in points_and_cursor()) {
        let mut idx = PickIndex::new("s", 100, 75, r);
        for (i, &p) in points.iter().enumerate() {
            idx.insert(i, p, p);
        }
        let (cols, rows) = idx.grid_dims();
        let cs = idx.cell_size();
        let mut placed = BTreeSet::new();
        for row in 0..rows {
            for col in 0..cols {
                let want: Vec<usize> = points
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| {
                        let nx = p.x.clamp(col as f64 * cs, (col + 1) as f64 * cs);
                        let ny = p.y.clamp(row as f64 * cs, (row + 1) as f64 * cs);
                        Point::new(nx, ny).distance(**p) <= r
                    })
                    .map(|(i, _)| i)
                    .collect();
                placed.extend(want.iter().copied());
                prop_assert_eq!(idx.cell_members(col, row), want);
            }
        }
        let outside: Vec<usize> = (0..points.len()).filter(|i| !placed.contains(i)).collect();
        prop_assert_eq!(idx.outside_members(), outside);
    }
}

fn array_case() -> impl Strategy<Value = (Vec<u64>, Vec<u64>, Vec<u64>, Vec<u64>)> {
    (1usize..=3)
        .prop_flat_map(|rank| {
            (
                prop::collection::vec(1u64..=9, rank),
                prop::collection::vec(1u64..=4, rank),
            )
        })
        .prop_flat_map(|(shape, chunks)| {
            let bounds: Vec<_> = shape
                .iter()
                .map(|&s| (0..s).prop_flat_map(move |o| (Just(o), 0..=s - o)))
                .collect();
            (Just(shape), Just(chunks), bounds)
        })
        .prop_map(|(shape, chunks, ol)| {
            let (offsets, lengths) = ol.into_iter().unzip();
            (shape, chunks, offsets, lengths)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn region_reads_are_minimal_and_correct((shape, chunks, offsets, lengths) in array_case()) {
        let n: u64 = shape.iter().product();
        let data: Vec<i32> = (0..n as i32).map(|i| i * 7 - 3).collect();
        let mut m = MemoryStore::new();
        m.insert_array("a", &shape, &chunks, &ArrayData::I32(data.clone())).unwrap();
        let mut reg = StoreRegistry::new();
        reg.register("m", Arc::new(m)).unwrap();
        let h = ArrayHandle::new("m", "a");
        let meta = ArrayMeta::new(shape.clone(), chunks.clone(), DType::I32).unwrap();

        // Brute force: the chunk of every element in the region.
        let rank = shape.len();
        let total: u64 = lengths.iter().product();
        let mut want_keys = BTreeSet::new();
        let mut want = Vec::new();
        for flat in 0..total {
            let mut rem = flat;
            let mut idx = vec![0u64; rank];
            for d in (0..rank).rev() {
                idx[d] = offsets[d] + rem % lengths[d];
                rem /= lengths[d];
            }
            let coord: Vec<u64> = idx.iter().zip(&chunks).map(|(i, c)| i / c).collect();
            want_keys.insert(chunk_key("a", &coord));
            let lin = idx.iter().zip(&shape).fold(0, |acc, (i, s)| acc * s + i);
            want.push(data[lin as usize]);
        }

        let planned: BTreeSet<String> = chunks_for_region(&meta, &offsets, &lengths)
            .unwrap()
            .iter()
            .map(|c| chunk_key("a", c))
            .collect();
        prop_assert_eq!(&planned, &want_keys);

        let got = read_region(&reg, &h, &meta, &offsets, &lengths).unwrap();
        let fetched: BTreeSet<String> = reg.take_fetch_log().into_iter().map(|r| r.key).collect();
        prop_assert_eq!(&fetched, &want_keys);
        prop_assert_eq!(got, ArrayData::I32(want));

        let again = read_region(&reg, &h, &meta, &offsets, &lengths).unwrap();
        let refetched: BTreeSet<String> = reg.take_fetch_log().into_iter().map(|r| r.key).collect();
        prop_assert_eq!(refetched, want_keys);
        prop_assert_eq!(again.len() as u64, total);
    }
}

fn color() -> impl Strategy<Value = Rgba8> {
    (any::<u8>(), any::<u8>(), any::<u8>(), any::<u8>()).prop_map(|(r, g, b, a)| Rgba8::new(r, g, b, a))
}

fn primitive() -> impl Strategy<Value = Primitive> {
    let coord = -20.0..60.0f64;
    let pt = (coord.clone(), coord.clone()).prop_map(|(x, y)| Point::new(x, y));
    prop_oneof![
        (prop::collection::vec(pt.clone(), 0..20), 0.0..6.0f64, color()).prop_map(|(centers, r, c)| {
            Primitive::Points {
                centers,
                radius_px: r,
                colors: PointColors::Uniform(c),
            }
        }),
        (prop::collection::vec(pt.clone(), 0..6), 0.5..5.0f64, color()).prop_map(|(points, w, c)| {
            Primitive::Polyline {
                points,
                width_px: w,
                color: c,
            }
        }),
        (
            prop::collection::vec((coord.clone(), coord.clone(), 0.0..30.0f64, 0.0..30.0f64), 0..5),
            color()
        )
            .prop_map(|(rs, c)| Primitive::Rects {
                rects: rs.into_iter().map(|(x, y, w, h)| RectPx::new(x, y, w, h)).collect(),
                color: c,
            }),
        (pt, "[ -~]{0,6}", 4.0..20.0f64, color()).prop_map(|(o, t, s, c)| Primitive::GlyphRun {
            origin: o,
            text: t,
            size_px: s,
            color: c,
            anchor: Default::default(),
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn svg_element_counts_match_draw_list(prims in prop::collection::vec(primitive(), 0..8)) {
        let dl: DrawList = prims.into_iter().collect::<Result<_, _>>().unwrap();
        let svg = to_svg(&dl, 40, 40, Rgba8::WHITE);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let count = |tag: &str| doc.descendants().filter(|n| n.has_tag_name(tag)).count();
        let c = dl.counts();
        prop_assert_eq!(count("circle"), c.circles);
        prop_assert_eq!(count("polyline"), c.polylines);
        prop_assert_eq!(count("rect"), c.rects + 1);
        prop_assert_eq!(count("text"), c.texts);
        prop_assert_eq!(count("image"), c.images);
    }

    #[test]
    fn rasterize_is_pure_and_opaque_draws_are_idempotent(prims in prop::collection::vec(primitive(), 0..8)) {
        let dl: DrawList = prims.iter().cloned().collect::<Result<_, _>>().unwrap();
        let a = rasterize(&dl, 40, 40, Rgba8::WHITE);
        prop_assert_eq!(&a, &rasterize(&dl, 40, 40, Rgba8::WHITE));

        let opaque: Vec<Primitive> = prims
            .into_iter()
            .map(|p| match p {
                Primitive::Rects { rects, color } => Primitive::Rects { rects, color: Rgba8 { a: 255, ..color } },
                other => other,
            })
            .filter(|p| matches!(p, Primitive::Rects { .. }))
            .collect();
        let once: DrawList = opaque.iter().cloned().collect::<Result<_, _>>().unwrap();
        let twice: DrawList = opaque.iter().chain(&opaque).cloned().collect::<Result<_, _>>().unwrap();
        prop_assert_eq!(rasterize(&once, 40, 40, Rgba8::WHITE), rasterize(&twice, 40, 40, Rgba8::WHITE));
    }

    #[test]
    fn primitives_off_canvas_change_nothing(
        x in prop_oneof![-500.0..-30.0f64, 70.0..500.0f64],
        y in -500.0..500.0f64,
        c in color(),
    ) {
        let mut dl = DrawList::new();
        dl.push(Primitive::Points { centers: vec![Point::new(x, y)], radius_px: 29.0, colors: PointColors::Uniform(c) }).unwrap();
        dl.push(Primitive::Rects { rects: vec![RectPx::new(x, y, 28.0, 28.0)], color: c }).unwrap();
        dl.push(Primitive::Polyline { points: vec![Point::new(x, y), Point::new(x, y + 40.0)], width_px: 10.0, color: c }).unwrap();
        let bg = Rgba8::new(9, 8, 7, 255);
        prop_assert!(rasterize(&dl, 40, 40, bg).chunks(4).all(|p| p == bg.to_array()));
    }
}

fn scatter_registry(xs: Vec<f64>, ys: Vec<f64>) -> StoreRegistry {
    let n = xs.len() as u64;
    let mut m = MemoryStore::new();
    m.insert_array("x", &[n], &[n.max(1)], &ArrayData::F64(xs)).unwrap();
    m.insert_array("y", &[n], &[n.max(1)], &ArrayData::F64(ys)).unwrap();
    let mut reg = StoreRegistry::new();
    reg.register("m", Arc::new(m)).unwrap();
    reg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    /// A culled point would not have covered any pixel.
    #[test]
    fn culling_is_sound(x in -80.0..80.0f64, y in -80.0..80.0f64, r in 0.5..10.0f64, zoom in log_uniform(0.1, 10.0)) {
        let cam = Camera2D::new(Point::new(0.0, 0.0), zoom, 50, 40).unwrap();
        let reg = scatter_registry(vec![x], vec![y]);
        let node = LayerNode::new(
            "s",
            "scatter",
            serde_json::json!({"x": {"store": "m", "path": "x"}, "y": {"store": "m", "path": "y"}, "radius_px": r}),
        );
        let frame = Renderer::default()
            .render_frame(&[node], &cam, &RenderParams::new(50, 40, OutputKind::Bitmap), &reg, &mut MemoCache::new())
            .unwrap();
        if frame.counts().circles == 0 {
            let mut dl = DrawList::new();
            dl.push(Primitive::Points {
                centers: vec![cam.world_to_screen(Point::new(x, y))],
                radius_px: r,
                colors: PointColors::Uniform(Rgba8::BLACK),
            })
            .unwrap();
            prop_assert!(rasterize(&dl, 50, 40, Rgba8::WHITE).iter().all(|&b| b == 255));
        }
    }

    #[test]
    fn bounded_memo_groups_never_exceed_capacity(keys in prop::collection::vec(0u8..20, 1..200), cap in 1usize..8) {
        let mut cache = MemoCache::new();
        for k in keys {
            cache.memoize_bounded("g", cap, &format!("k{k}"), &k, || Ok::<_, ()>(k)).unwrap();
            prop_assert!(cache.group_len("g") <= cap);
        }
    }
}
