use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{read_column, Colormap};
use crate::chunkstore::{ArrayHandle, StoreRegistry};
use crate::drawlist::{PointColors, Primitive, Rgba8};
use crate::geom::Point;
use crate::interact::PickIndex;
use crate::scene::{
    Camera2D, DrawContext, Layer, LayerError, LayerNode, LayerOutput, OutputKind, PrepareContext, Prepared,
};

fn default_radius() -> f64 {
    3.0
}

fn default_cap() -> usize {
    50_000
}

fn default_color() -> Rgba8 {
    Rgba8::opaque(31, 119, 180)
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterProps {
    pub x: ArrayHandle,
    pub y: ArrayHandle,
    #[serde(default)]
    pub value: Option<ArrayHandle>,
    #[serde(default)]
    pub colormap: Colormap,
    #[serde(default = "default_color")]
    pub uniform_color: Rgba8,
    #[serde(default = "default_radius")]
    pub radius_px: f64,
    #[serde(default = "default_cap")]
    pub vector_point_cap: usize,
    /// Only rows `[start, end)` are loaded, so only their chunks are fetched.
    #[serde(default)]
    pub row_range: Option<[u64; 2]>,
    /// Build a pick index for hover and click.
    #[serde(default = "default_true")]
    pub pickable: bool,
}

impl ScatterProps {
    pub fn new(x: ArrayHandle, y: ArrayHandle) -> Self {
        Self {
            x,
            y,
            value: None,
            colormap: Colormap::default(),
            uniform_color: default_color(),
            radius_px: default_radius(),
            vector_point_cap: default_cap(),
            row_range: None,
            pickable: true,
        }
    }

    pub fn validate(&self) -> Result<(), LayerError> {
        if !(self.radius_px.is_finite() && self.radius_px > 0.0) {
            return Err(LayerError::Props(format!(
                "radius_px must be > 0, got {}",
                self.radius_px
            )));
        }
        if self.vector_point_cap == 0 {
            return Err(LayerError::Props("vector_point_cap must be >= 1".into()));
        }
        if let Some([s, e]) = self.row_range {
            if s > e {
                return Err(LayerError::Props(format!("row_range start {s} is after end {e}")));
            }
        }
        Ok(())
    }
}

/// Points that survived culling, in screen pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPrepared {
    pub centers: Vec<Point>,
    pub world: Vec<Point>,
    /// Row of each kept point in the source columns.
    pub datum_index: Vec<usize>,
    pub colors: PointColors,
    pub radius_px: f64,
    pub vector_point_cap: usize,
    pub pickable: bool,
}

struct Columns {
    x: Vec<f64>,
    y: Vec<f64>,
    norm: Option<Vec<f64>>,
}

fn load_columns(registry: &StoreRegistry, props: &ScatterProps) -> Result<Columns, LayerError> {
    let (_, x) = read_column(registry, &props.x, props.row_range, true)?;
    let (_, y) = read_column(registry, &props.y, props.row_range, true)?;
    if x.len() != y.len() {
        return Err(LayerError::Data(format!(
            "x has {} rows but y has {}",
            x.len(),
            y.len()
        )));
    }
    let norm = match &props.value {
        None => None,
        Some(h) => {
            let (_, v) = read_column(registry, h, props.row_range, false)?;
            if v.len() != x.len() {
                return Err(LayerError::Data(format!(
                    "value has {} rows but x has {}",
                    v.len(),
                    x.len()
                )));
            }
            let (lo, hi) = v
                .iter()
                .filter(|v| v.is_finite())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            let span = hi - lo;
            Some(
                v.iter()
                    .map(|&v| if span > 0.0 { (v - lo) / span } else { 0.0 })
                    .collect(),
            )
        }
    };
    Ok(Columns { x, y, norm })
}

/// Loads (memoized) columns, projects them and culls everything farther
/// than `radius_px` outside the viewport.
pub fn scatter_prepare(props: &ScatterProps, ctx: &mut PrepareContext<'_>) -> Result<ScatterPrepared, LayerError> {
    props.validate()?;
    let registry = ctx.registry;
    let deps = (&props.x, &props.y, &props.value, props.row_range);
    let cols: Arc<Columns> = ctx.memo("columns", &deps, || load_columns(registry, props))?;
    Ok(project(&cols, props, ctx.camera))
}

fn project(cols: &Columns, props: &ScatterProps, camera: &Camera2D) -> ScatterPrepared {
    let r = props.radius_px;
    let (w, h) = (camera.width_px() as f64, camera.height_px() as f64);
    let base = props.row_range.map_or(0, |[s, _]| s as usize);
    let mut out = ScatterPrepared {
        centers: Vec::new(),
        world: Vec::new(),
        datum_index: Vec::new(),
        colors: PointColors::Uniform(props.uniform_color),
        radius_px: r,
        vector_point_cap: props.vector_point_cap,
        pickable: props.pickable,
    };
    let mut colors = Vec::new();
    for i in 0..cols.x.len() {
        let world = Point::new(cols.x[i], cols.y[i]);
        let s = camera.world_to_screen(world);
        let keep = s.x >= -r && s.x <= w + r && s.y >= -r && s.y <= h + r;
        if !keep {
            continue;
        }
        out.centers.push(s);
        out.world.push(world);
        out.datum_index.push(base + i);
        if let Some(norm) = &cols.norm {
            colors.push(props.colormap.lookup(norm[i]));
        }
    }
    if cols.norm.is_some() {
        out.colors = PointColors::PerPoint(colors);
    }
    out
}

/// One Points primitive, or a capacity error for oversized vector output.
pub fn scatter_draw(prepared: ScatterPrepared, output: OutputKind) -> Result<Primitive, LayerError> {
    let visible = prepared.centers.len();
    if output == OutputKind::Vector && visible > prepared.vector_point_cap {
        return Err(LayerError::VectorCapacity {
            visible,
            cap: prepared.vector_point_cap,
        });
    }
    Ok(Primitive::Points {
        centers: prepared.centers,
        radius_px: prepared.radius_px,
        colors: prepared.colors,
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ScatterLayer;

impl Layer for ScatterLayer {
    fn prepare(&self, node: &LayerNode, ctx: &mut PrepareContext<'_>) -> Result<Prepared, LayerError> {
        let props: ScatterProps = node.props()?;
        Ok(Box::new(scatter_prepare(&props, ctx)?))
    }

    fn draw(
        &self,
        _: &LayerNode,
        prepared: Prepared,
        ctx: &DrawContext<'_>,
        out: &mut LayerOutput,
    ) -> Result<(), LayerError> {
        let prepared = *prepared
            .downcast::<ScatterPrepared>()
            .expect("scatter draw receives its own prepare output");
        if prepared.pickable {
            let mut index = PickIndex::new(
                ctx.layer_id,
                ctx.camera.width_px(),
                ctx.camera.height_px(),
                prepared.radius_px,
            );
            for ((&d, &c), &w) in prepared.datum_index.iter().zip(&prepared.centers).zip(&prepared.world) {
                index.insert(d, c, w);
            }
            out.pick = Some(index);
        }
        out.primitives.push(scatter_draw(prepared, ctx.output)?);
        Ok(())
    }
}
