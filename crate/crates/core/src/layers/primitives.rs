use serde::{Deserialize, Serialize};

use super::Coords;
use crate::drawlist::{Primitive, RectPx, Rgba8, TextAnchor};
use crate::geom::Point;
use crate::scene::{DrawContext, Layer, LayerError, LayerNode, LayerOutput, PrepareContext, Prepared};

fn one() -> f64 {
    1.0
}

fn black() -> Rgba8 {
    Rgba8::BLACK
}

fn eight() -> f64 {
    8.0
}

/// Stroked open path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineProps {
    pub points: Vec<[f64; 2]>,
    #[serde(default)]
    pub coords: Coords,
    #[serde(default = "one")]
    pub width_px: f64,
    #[serde(default = "black")]
    pub color: Rgba8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TextProps {
    pub text: String,
    pub position: [f64; 2],
    #[serde(default)]
    pub coords: Coords,
    #[serde(default = "eight")]
    pub size_px: f64,
    #[serde(default = "black")]
    pub color: Rgba8,
    #[serde(default)]
    pub anchor: TextAnchor,
}

/// Bars in world units: bar `i` spans `[x[i], x[i] + width]` horizontally
/// and `[baseline, baseline + heights[i]]` vertically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarProps {
    pub x: Vec<f64>,
    pub heights: Vec<f64>,
    pub width: f64,
    #[serde(default)]
    pub baseline: f64,
    #[serde(default = "black")]
    pub color: Rgba8,
}

/// Layers whose props fully determine their output parse in `prepare` and
/// emit in `draw`.
fn parse<T: for<'de> Deserialize<'de> + Send + 'static>(node: &LayerNode) -> Result<Prepared, LayerError> {
    Ok(Box::new(node.props::<T>()?))
}

fn take<T: 'static>(prepared: Prepared) -> T {
    *prepared.downcast::<T>().expect("draw receives its own prepare output")
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LineLayer;

impl Layer for LineLayer {
    fn prepare(&self, node: &LayerNode, _: &mut PrepareContext<'_>) -> Result<Prepared, LayerError> {
        parse::<LineProps>(node)
    }

    fn draw(
        &self,
        _: &LayerNode,
        prepared: Prepared,
        ctx: &DrawContext<'_>,
        out: &mut LayerOutput,
    ) -> Result<(), LayerError> {
        let p: LineProps = take(prepared);
        out.primitives.push(Primitive::Polyline {
            points: p
                .points
                .iter()
                .map(|&q| p.coords.to_screen(ctx.camera, q.into()))
                .collect(),
            width_px: p.width_px,
            color: p.color,
        });
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TextLayer;

impl Layer for TextLayer {
    fn prepare(&self, node: &LayerNode, _: &mut PrepareContext<'_>) -> Result<Prepared, LayerError> {
        parse::<TextProps>(node)
    }

    fn draw(
        &self,
        _: &LayerNode,
        prepared: Prepared,
        ctx: &DrawContext<'_>,
        out: &mut LayerOutput,
    ) -> Result<(), LayerError> {
        let p: TextProps = take(prepared);
        out.primitives.push(Primitive::GlyphRun {
            origin: p.coords.to_screen(ctx.camera, p.position.into()),
            text: p.text,
            size_px: p.size_px,
            color: p.color,
            anchor: p.anchor,
        });
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BarLayer;

impl Layer for BarLayer {
    fn prepare(&self, node: &LayerNode, _: &mut PrepareContext<'_>) -> Result<Prepared, LayerError> {
        let p: BarProps = node.props()?;
        if p.x.len() != p.heights.len() {
            return Err(LayerError::Props(format!(
                "bar has {} x positions but {} heights",
                p.x.len(),
                p.heights.len()
            )));
        }
        Ok(Box::new(p))
    }

    fn draw(
        &self,
        _: &LayerNode,
        prepared: Prepared,
        ctx: &DrawContext<'_>,
        out: &mut LayerOutput,
    ) -> Result<(), LayerError> {
        let p: BarProps = take(prepared);
        let cam = ctx.camera;
        let rects =
            p.x.iter()
                .zip(&p.heights)
                .map(|(&x, &h)| {
                    let a = cam.world_to_screen(Point::new(x, p.baseline));
                    let b = cam.world_to_screen(Point::new(x + p.width, p.baseline + h));
                    RectPx::new(a.x.min(b.x), a.y.min(b.y), (b.x - a.x).abs(), (b.y - a.y).abs())
                })
                .collect();
        out.primitives.push(Primitive::Rects { rects, color: p.color });
        Ok(())
    }
}
