//! Backend-neutral drawing primitives and the backends that consume them.
//!
//! Layers emit [`Primitive`]s into a [`DrawList`] in logical pixels. The same
//! list is then handed to either the CPU reference rasterizer
//! ([`rasterize`]) or the SVG serializer ([`to_svg`]), which is what keeps
//! bitmap and vector output of a scene structurally identical.

mod backend;
mod font;
mod png;
mod raster;
mod svg;

use std::fmt;
use std::sync::Arc;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::geom::Point;

pub use backend::{rasterize_with_fallback, CpuRasterizer, RasterBackend, RasterError};
pub use font::{glyph_scale, text_width_px, GLYPH_SIZE};
pub use png::{encode_png, PngError, PNG_SIGNATURE};
pub use raster::rasterize;
pub use svg::{format_number, to_svg};

/// Non-premultiplied 8-bit RGBA color.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Rgba8 {
    pub r: u8,
    pub g: u8,
    pub b: u8,
    pub a: u8,
}

impl Rgba8 {
    pub const WHITE: Rgba8 = Rgba8::new(255, 255, 255, 255);
    pub const BLACK: Rgba8 = Rgba8::new(0, 0, 0, 255);
    pub const TRANSPARENT: Rgba8 = Rgba8::new(0, 0, 0, 0);

    pub const fn new(r: u8, g: u8, b: u8, a: u8) -> Self {
        Self { r, g, b, a }
    }

    pub const fn opaque(r: u8, g: u8, b: u8) -> Self {
        Self::new(r, g, b, 255)
    }

    pub fn to_array(self) -> [u8; 4] {
        [self.r, self.g, self.b, self.a]
    }

    /// Parses `#rrggbb` or `#rrggbbaa`.
    pub fn from_hex(s: &str) -> Option<Self> {
        let hex = s.strip_prefix('#')?;
        if !hex.is_ascii() {
            return None;
        }
        let byte = |i: usize| u8::from_str_radix(hex.get(i..i + 2)?, 16).ok();
        match hex.len() {
            6 => Some(Self::opaque(byte(0)?, byte(2)?, byte(4)?)),
            8 => Some(Self::new(byte(0)?, byte(2)?, byte(4)?, byte(6)?)),
            _ => None,
        }
    }

    pub fn to_hex_rgb(self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.r, self.g, self.b)
    }
}

impl Serialize for Rgba8 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_array().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Rgba8 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ColorVisitor;

        impl<'de> Visitor<'de> for ColorVisitor {
            type Value = Rgba8;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a color as [r, g, b], [r, g, b, a] or \"#rrggbb[aa]\"")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rgba8, E> {
                Rgba8::from_hex(v).ok_or_else(|| E::custom(format!("invalid hex color {v:?}")))
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Rgba8, A::Error> {
                let mut parts = [0u8, 0, 0, 255];
                let mut n = 0;
                while let Some(c) = seq.next_element::<u8>()? {
                    if n == 4 {
                        return Err(de::Error::invalid_length(5, &self));
                    }
                    parts[n] = c;
                    n += 1;
                }
                if n < 3 {
                    return Err(de::Error::invalid_length(n, &self));
                }
                Ok(Rgba8::new(parts[0], parts[1], parts[2], parts[3]))
            }
        }

        deserializer.deserialize_any(ColorVisitor)
    }
}

/// Axis-aligned rectangle in screen pixels, origin top-left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectPx {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl RectPx {
    pub const fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointColors {
    Uniform(Rgba8),
    PerPoint(Vec<Rgba8>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    Nearest,
    Bilinear,
}

/// Horizontal alignment of a glyph run relative to its origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextAnchor {
    #[default]
    Start,
    Middle,
    End,
}

/// An RGBA8 bitmap. Pixels are shared so cached tiles can be blitted
/// without copying.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageData {
    width: u32,
    height: u32,
    pixels: Arc<Vec<u8>>,
}

impl ImageData {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self, PrimitiveError> {
        let expected = 4 * width as usize * height as usize;
        if pixels.len() != expected {
            return Err(PrimitiveError::ImageLength {
                expected,
                actual: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels: Arc::new(pixels),
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    fn texel(&self, x: usize, y: usize) -> [u8; 4] {
        let i = 4 * (y * self.width as usize + x);
        [
            self.pixels[i],
            self.pixels[i + 1],
            self.pixels[i + 2],
            self.pixels[i + 3],
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Primitive {
    /// Filled discs.
    Points {
        centers: Vec<Point>,
        radius_px: f64,
        colors: PointColors,
    },
    /// Stroked open path with round joins and caps.
    Polyline {
        points: Vec<Point>,
        width_px: f64,
        color: Rgba8,
    },
    /// Filled rectangles sharing one color.
    Rects { rects: Vec<RectPx>, color: Rgba8 },
    /// Monospace text; `origin` is the top of the run, horizontally placed
    /// according to `anchor`.
    GlyphRun {
        origin: Point,
        text: String,
        size_px: f64,
        color: Rgba8,
        anchor: TextAnchor,
    },
    ImageBlit {
        dest: RectPx,
        source: ImageData,
        sampling: Sampling,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PrimitiveError {
    #[error("point radius must be finite and >= 0, got {0}")]
    Radius(f64),
    #[error("stroke width must be finite and > 0, got {0}")]
    StrokeWidth(f64),
    #[error("rect size must be >= 0, got {w}x{h}")]
    RectSize { w: f64, h: f64 },
    #[error("text size must be finite and > 0, got {0}")]
    TextSize(f64),
    #[error("{colors} per-point colors for {points} points")]
    ColorCount { points: usize, colors: usize },
    #[error("image byte length {actual} does not match 4*w*h = {expected}")]
    ImageLength { expected: usize, actual: usize },
}

impl Primitive {
    pub fn validate(&self) -> Result<(), PrimitiveError> {
        match self {
            Primitive::Points {
                centers,
                radius_px,
                colors,
            } => {
                if !(radius_px.is_finite() && *radius_px >= 0.0) {
                    return Err(PrimitiveError::Radius(*radius_px));
                }
                if let PointColors::PerPoint(c) = colors {
                    if c.len() != centers.len() {
                        return Err(PrimitiveError::ColorCount {
                            points: centers.len(),
                            colors: c.len(),
                        });
                    }
                }
            }
            Primitive::Polyline { width_px, .. } => {
                if !(width_px.is_finite() && *width_px > 0.0) {
                    return Err(PrimitiveError::StrokeWidth(*width_px));
                }
            }
            Primitive::Rects { rects, .. } => {
                if let Some(r) = rects.iter().find(|r| !(r.w >= 0.0 && r.h >= 0.0)) {
                    return Err(PrimitiveError::RectSize { w: r.w, h: r.h });
                }
            }
            Primitive::GlyphRun { size_px, .. } => {
                if !(size_px.is_finite() && *size_px > 0.0) {
                    return Err(PrimitiveError::TextSize(*size_px));
                }
            }
            Primitive::ImageBlit { dest, .. } => {
                if !(dest.w >= 0.0 && dest.h >= 0.0) {
                    return Err(PrimitiveError::RectSize { w: dest.w, h: dest.h });
                }
            }
        }
        Ok(())
    }

    /// Returns a copy with every coordinate and size multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Primitive {
        let pt = |p: &Point| Point::new(p.x * factor, p.y * factor);
        let rect = |r: &RectPx| RectPx::new(r.x * factor, r.y * factor, r.w * factor, r.h * factor);
        match self {
            Primitive::Points {
                centers,
                radius_px,
                colors,
            } => Primitive::Points {
                centers: centers.iter().map(pt).collect(),
                radius_px: radius_px * factor,
                colors: colors.clone(),
            },
            Primitive::Polyline {
                points,
                width_px,
                color,
            } => Primitive::Polyline {
                points: points.iter().map(pt).collect(),
                width_px: width_px * factor,
                color: *color,
            },
            Primitive::Rects { rects, color } => Primitive::Rects {
                rects: rects.iter().map(rect).collect(),
                color: *color,
            },
            Primitive::GlyphRun {
                origin,
                text,
                size_px,
                color,
                anchor,
            } => Primitive::GlyphRun {
                origin: pt(origin),
                text: text.clone(),
                size_px: size_px * factor,
                color: *color,
                anchor: *anchor,
            },
            Primitive::ImageBlit { dest, source, sampling } => Primitive::ImageBlit {
                dest: rect(dest),
                source: source.clone(),
                sampling: *sampling,
            },
        }
    }
}

/// Number of logical shapes per SVG element type a draw list produces.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PrimitiveCounts {
    pub circles: usize,
    pub polylines: usize,
    pub rects: usize,
    pub texts: usize,
    pub images: usize,
}

/// Ordered primitives, painted first to last with source-over blending.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DrawList {
    primitives: Vec<Primitive>,
}

impl DrawList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, primitive: Primitive) -> Result<(), PrimitiveError> {
        primitive.validate()?;
        self.primitives.push(primitive);
        Ok(())
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    pub fn len(&self) -> usize {
        self.primitives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primitives.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> DrawList {
        DrawList {
            primitives: self.primitives.iter().map(|p| p.scaled(factor)).collect(),
        }
    }

    /// Logical shape counts, excluding the background rect the backends add.
    pub fn counts(&self) -> PrimitiveCounts {
        let mut c = PrimitiveCounts::default();
        for p in &self.primitives {
            match p {
                Primitive::Points { centers, .. } => c.circles += centers.len(),
                Primitive::Polyline { .. } => c.polylines += 1,
                Primitive::Rects { rects, .. } => c.rects += rects.len(),
                Primitive::GlyphRun { .. } => c.texts += 1,
                Primitive::ImageBlit { .. } => c.images += 1,
            }
        }
        c
    }
}

impl FromIterator<Primitive> for Result<DrawList, PrimitiveError> {
    fn from_iter<I: IntoIterator<Item = Primitive>>(iter: I) -> Self {
        let mut dl = DrawList::new();
        for p in iter {
            dl.push(p)?;
        }
        Ok(dl)
    }
}
