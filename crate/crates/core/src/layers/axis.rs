use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::drawlist::{glyph_scale, Rgba8, TextAnchor, GLYPH_SIZE};
use crate::geom::Point;
use crate::scene::{Camera2D, DrawContext, Layer, LayerError, LayerNode, LayerOutput, PrepareContext, Prepared};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisOrientation {
    X,
    Y,
}

fn default_ticks() -> usize {
    6
}

fn default_label_size() -> f64 {
    8.0
}

fn default_tick_length() -> f64 {
    5.0
}

fn black() -> Rgba8 {
    Rgba8::BLACK
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisProps {
    pub orientation: AxisOrientation,
    #[serde(default = "default_ticks")]
    pub target_tick_count: usize,
    #[serde(default = "black")]
    pub color: Rgba8,
    #[serde(default = "default_label_size")]
    pub label_size_px: f64,
    #[serde(default = "default_tick_length")]
    pub tick_length_px: f64,
}

/// Smallest step `m * 10^k` (m in 1, 2, 5) with `(hi - lo) / step` at most
/// `target`, as `(m, k)`.
fn nice_step(range: f64, target: usize) -> (u32, i32) {
    let mut k = (range / target as f64).log10().floor() as i32 - 1;
    loop {
        for m in [1u32, 2, 5] {
            if range / step_value(m, k) <= target as f64 {
                return (m, k);
            }
        }
        k += 1;
    }
}

fn step_value(m: u32, k: i32) -> f64 {
    multiple(1, m, k)
}

/// `i * m * 10^k`, dividing by an exact power of ten for negative `k` so
/// values like 0.6 come out as the nearest double rather than 0.6000000001.
fn multiple(i: i64, m: u32, k: i32) -> f64 {
    let n = (i * m as i64) as f64;
    if k < 0 {
        n / 10f64.powi(-k)
    } else {
        n * 10f64.powi(k)
    }
}

/// Ticks at the multiples of a 1-2-5 step inside `[lo, hi]`.
pub fn nice_ticks(lo: f64, hi: f64, target_count: usize) -> Vec<f64> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Vec::new();
    }
    if lo == hi {
        return vec![lo];
    }
    let (m, k) = nice_step(hi - lo, target_count.max(2));
    let step = step_value(m, k);
    let first = (lo / step).ceil() as i64 - 1;
    let last = (hi / step).floor() as i64 + 1;
    (first..=last)
        .map(|i| multiple(i, m, k) + 0.0)
        .filter(|&v| v >= lo && v <= hi)
        .collect()
}

/// Fractional digits that tell adjacent ticks apart.
pub fn tick_decimals(lo: f64, hi: f64, target_count: usize) -> usize {
    // Also catches NaN bounds.
    if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
        return 0;
    }
    let (_, k) = nice_step(hi - lo, target_count.max(2));
    (-k).max(0) as usize
}

/// Child layers for an axis over world range `[lo, hi]` along its
/// orientation: one rule, then one tick line and one label per tick.
pub fn axis_children(id: &str, props: &AxisProps, lo: f64, hi: f64, camera: &Camera2D) -> Vec<LayerNode> {
    let ticks = nice_ticks(lo, hi, props.target_tick_count);
    let decimals = tick_decimals(lo, hi, props.target_tick_count);
    let (w, h) = (camera.width_px() as f64, camera.height_px() as f64);
    let label_h = (glyph_scale(props.label_size_px) * GLYPH_SIZE) as f64;
    let tl = props.tick_length_px;
    let line = |suffix: String, a: [f64; 2], b: [f64; 2]| {
        LayerNode::new(
            format!("{id}/{suffix}"),
            "line",
            json!({"points": [a, b], "coords": "screen", "width_px": 1.0, "color": props.color}),
        )
    };
    let label = |i: usize, v: f64, pos: [f64; 2], anchor: TextAnchor| {
        LayerNode::new(
            format!("{id}/label/{i}"),
            "text",
            json!({
                "text": format!("{:.*}", decimals, v),
                "position": pos,
                "coords": "screen",
                "size_px": props.label_size_px,
                "color": props.color,
                "anchor": anchor,
            }),
        )
    };

    let mut out = Vec::with_capacity(1 + 2 * ticks.len());
    let mut tick_lines = Vec::new();
    let mut labels = Vec::new();
    match props.orientation {
        AxisOrientation::X => {
            let y = (h - label_h - tl - 2.0).max(0.0);
            out.push(line("rule".into(), [0.0, y], [w, y]));
            for (i, &v) in ticks.iter().enumerate() {
                let x = camera.world_to_screen(Point::new(v, 0.0)).x;
                tick_lines.push(line(format!("tick/{i}"), [x, y], [x, y + tl]));
                labels.push(label(i, v, [x, y + tl + 2.0], TextAnchor::Middle));
            }
        }
        AxisOrientation::Y => {
            let texts: Vec<String> = ticks.iter().map(|v| format!("{:.*}", decimals, v)).collect();
            let widest = texts
                .iter()
                .map(|t| crate::drawlist::text_width_px(t, props.label_size_px))
                .fold(0.0, f64::max);
            let x = (widest + tl + 2.0).min(w);
            out.push(line("rule".into(), [x, 0.0], [x, h]));
            for (i, &v) in ticks.iter().enumerate() {
                let y = camera.world_to_screen(Point::new(0.0, v)).y;
                tick_lines.push(line(format!("tick/{i}"), [x - tl, y], [x, y]));
                labels.push(label(i, v, [x - tl - 2.0, y - label_h / 2.0], TextAnchor::End));
            }
        }
    }
    out.extend(tick_lines);
    out.extend(labels);
    out
}

/// Composite layer: expands into line and text children covering the
/// camera's visible world extent.
#[derive(Debug, Clone, Copy, Default)]
pub struct AxisLayer;

impl Layer for AxisLayer {
    fn prepare(&self, node: &LayerNode, _: &mut PrepareContext<'_>) -> Result<Prepared, LayerError> {
        let props: AxisProps = node.props()?;
        if props.target_tick_count < 2 {
            return Err(LayerError::Props("target_tick_count must be >= 2".into()));
        }
        Ok(Box::new(props))
    }

    fn draw(
        &self,
        node: &LayerNode,
        prepared: Prepared,
        ctx: &DrawContext<'_>,
        out: &mut LayerOutput,
    ) -> Result<(), LayerError> {
        let props = *prepared
            .downcast::<AxisProps>()
            .expect("axis draw receives its own prepare output");
        let view = ctx.camera.visible_world();
        let (lo, hi) = match props.orientation {
            AxisOrientation::X => (view.min.x, view.max.x),
            AxisOrientation::Y => (view.min.y, view.max.y),
        };
        out.children = axis_children(&node.id, &props, lo, hi, ctx.camera);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Enumerates 1-2-5 steps upward from a tiny one and returns ticks from
    /// the first that fits.
    fn oracle(lo: f64, hi: f64, target: usize) -> Vec<f64> {
        if lo == hi {
            return vec![lo];
        }
        let mut candidates = Vec::new();
        for e in -12i32..=12 {
            for m in [1.0, 2.0, 5.0] {
                candidates.push((m * 10f64.powi(e), m, e));
            }
        }
        let (step, m, e) = candidates
            .into_iter()
            .find(|(s, _, _)| (hi - lo) / s <= target as f64)
            .unwrap();
        let mut ticks = Vec::new();
        let mut i = (lo / step).ceil() as i64 - 2;
        while (i as f64) * step <= hi + step {
            let v = if e < 0 {
                i as f64 * m / 10f64.powi(-e)
            } else {
                i as f64 * m * 10f64.powi(e)
            };
            if v >= lo && v <= hi {
                ticks.push(v + 0.0);
            }
            i += 1;
        }
        ticks
    }

    #[test]
    fn examples() {
        assert_eq!(nice_ticks(0.0, 100.0, 6), vec![0.0, 20.0, 40.0, 60.0, 80.0, 100.0]);
        assert_eq!(nice_ticks(0.0, 1.0, 6), vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0]);
        assert_eq!(nice_ticks(5.0, 5.0, 5), vec![5.0]);
        assert_eq!(nice_ticks(0.0, 100.0, 6), oracle(0.0, 100.0, 6));
        assert_eq!(nice_ticks(0.0, 1.0, 6), oracle(0.0, 1.0, 6));
    }

    #[test]
    fn matches_oracle_on_random_ranges() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let lo: f64 = rng.random_range(-1e4..1e4);
            let span = 10f64.powf(rng.random_range(-3.0..4.0));
            let target = rng.random_range(2..12);
            let t = nice_ticks(lo, lo + span, target);
            assert_eq!(t, oracle(lo, lo + span, target), "lo {lo} span {span} target {target}");
            assert!(t.len() <= target + 1);
        }
    }

    #[test]
    fn axis_child_counts() {
        let cam = Camera2D::new(Point::new(50.0, 50.0), 2.0, 200, 200).unwrap();
        let props = AxisProps {
            orientation: AxisOrientation::X,
            target_tick_count: 6,
            color: Rgba8::BLACK,
            label_size_px: 8.0,
            tick_length_px: 5.0,
        };
        let kids = axis_children("ax", &props, 0.0, 100.0, &cam);
        assert_eq!(kids.iter().filter(|k| k.kind == "line").count(), 7);
        assert_eq!(kids.iter().filter(|k| k.kind == "text").count(), 6);
        let labels: Vec<&str> = kids
            .iter()
            .filter(|k| k.kind == "text")
            .map(|k| k.props["text"].as_str().unwrap())
            .collect();
        assert_eq!(labels, ["0", "20", "40", "60", "80", "100"]);

        let y = AxisProps {
            orientation: AxisOrientation::Y,
            ..props.clone()
        };
        let kids_y = axis_children("ay", &y, 0.0, 100.0, &cam);
        assert_eq!(kids_y.len(), kids.len());

        let single = axis_children("a0", &props, 3.0, 3.0, &cam);
        assert_eq!(single.len(), 3);
    }

    #[test]
    fn decimals_follow_step() {
        assert_eq!(tick_decimals(0.0, 1.0, 6), 1);
        assert_eq!(tick_decimals(0.0, 0.05, 5), 2);
        assert_eq!(tick_decimals(0.0, 100.0, 6), 0);
    }
}
