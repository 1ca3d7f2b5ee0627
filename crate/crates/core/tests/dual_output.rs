//! Bitmap and vector renders of one scene come from the same draw list.

use std::sync::Arc;

use pluot_core::chunkstore::{ArrayData, MemoryStore};
use pluot_core::layers::encode_pyramid;
use pluot_core::scene::MemoCache;
use pluot_core::{
    ArrayHandle, Camera2D, LayerNode, OutputKind, Point, RenderOutput, RenderParams, Renderer, StoreRegistry,
};
use serde_json::json;

fn registry() -> StoreRegistry {
    let n = 300u64;
    let xs: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin() * 40.0).collect();
    let ys: Vec<f64> = (0..n).map(|i| (i as f64 * 0.11).cos() * 30.0).collect();
    let mut m = MemoryStore::new();
    m.insert_array("x", &[n], &[64], &ArrayData::F64(xs.clone())).unwrap();
    m.insert_array("y", &[n], &[64], &ArrayData::F64(ys)).unwrap();
    m.insert_array("v", &[n], &[64], &ArrayData::F64(xs)).unwrap();
    let base: Vec<f32> = (0..2 * 40 * 40).map(|i| (i % 50) as f32).collect();
    for (k, v) in encode_pyramid("img", [2, 40, 40], &base, 2, [16, 16]).unwrap() {
        m.insert(k, v);
    }
    let mut reg = StoreRegistry::new();
    reg.register("m", Arc::new(m)).unwrap();
    reg
}

fn scene() -> Vec<LayerNode> {
    let h = |p: &str| ArrayHandle::new("m", p);
    vec![
        LayerNode::new(
            "img",
            "image",
            json!({
                "group": h("img"),
                "channels": [
                    {"channel_index": 0, "color": [255, 0, 255], "contrast": [0, 50]},
                    {"channel_index": 1, "color": [0, 255, 0], "contrast": [10, 40]}
                ]
            }),
        ),
        LayerNode::new(
            "s",
            "scatter",
            json!({"x": h("x"), "y": h("y"), "value": h("v"), "radius_px": 2.5}),
        ),
        LayerNode::new(
            "hist",
            "histogram",
            json!({"values": h("v"), "n_bins": 12, "bar_color": [0, 0, 0, 60]}),
        ),
        LayerNode::new("ax", "axis", json!({"orientation": "x"})),
        LayerNode::new("ay", "axis", json!({"orientation": "y", "target_tick_count": 4})),
        LayerNode::new(
            "title",
            "text",
            json!({"text": "demo <&>", "position": [60, 2], "coords": "screen", "anchor": "middle"}),
        ),
        LayerNode::new(
            "bars",
            "bar",
            json!({"x": [-10, 0, 10], "heights": [5, -5, 10], "width": 4}),
        ),
    ]
}

#[test]
fn counts_agree_and_outputs_are_deterministic() {
    let reg = registry();
    let cam = Camera2D::new(Point::new(10.0, -5.0), 1.5, 120, 90).unwrap();
    let r = Renderer::default();
    let run = |kind: OutputKind, cache: &mut MemoCache| {
        r.render_frame(&scene(), &cam, &RenderParams::new(120, 90, kind), &reg, cache)
            .unwrap()
    };
    let mut cache = MemoCache::new();
    let bitmap = run(OutputKind::Bitmap, &mut cache);
    let vector = run(OutputKind::Vector, &mut MemoCache::new());
    assert_eq!(bitmap.counts(), vector.counts());
    assert!(bitmap.counts().images > 0 && bitmap.counts().circles > 0 && bitmap.counts().texts > 0);

    let RenderOutput::Vector { svg } = &vector.output else {
        panic!()
    };
    let doc = roxmltree::Document::parse(svg).unwrap();
    let n = |t: &str| doc.descendants().filter(|e| e.has_tag_name(t)).count();
    let c = vector.counts();
    assert_eq!(
        (n("circle"), n("polyline"), n("rect") - 1, n("text"), n("image")),
        (c.circles, c.polylines, c.rects, c.texts, c.images)
    );

    // Warm cache, cold cache and a second warm run are byte-identical.
    let warm = run(OutputKind::Bitmap, &mut cache);
    assert_eq!(warm.stats.fetches, 0);
    assert_eq!(warm.output, bitmap.output);
    assert_eq!(run(OutputKind::Bitmap, &mut MemoCache::new()).output, bitmap.output);
    assert_eq!(run(OutputKind::Vector, &mut cache).output, vector.output);
}
