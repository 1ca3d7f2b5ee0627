//! Deterministic, aliased CPU reference rasterizer.
//!
//! Coverage rule for every primitive: a pixel is covered iff its center
//! `(i + 0.5, j + 0.5)` lies inside the shape. Rect-like shapes are
//! half-open (`x <= cx < x + w`) so abutting rects never double-cover.

use super::font::{glyph, glyph_scale, text_width_px, GLYPH_SIZE};
use super::{DrawList, ImageData, PointColors, Primitive, Rgba8, Sampling, TextAnchor};
use crate::geom::Point;

/// Rasterizes `dl` onto a `width` x `height` canvas filled with `background`.
/// Returns `4 * width * height` RGBA8 bytes, row-major from the top-left.
pub fn rasterize(dl: &DrawList, width: u32, height: u32, background: Rgba8) -> Vec<u8> {
    let mut canvas = Canvas::new(width, height, background);
    for p in dl.primitives() {
        canvas.draw(p);
    }
    canvas.pixels
}

struct Canvas {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

/// Half-open pixel index span covering centers in `[lo, hi)`, clipped to `[0, n)`.
fn span(lo: f64, hi: f64, n: usize) -> (usize, usize) {
    let a = (lo - 0.5).ceil();
    let b = (hi - 0.5).ceil();
    let clip = |v: f64| {
        if v.is_nan() {
            0
        } else {
            v.clamp(0.0, n as f64) as usize
        }
    };
    let (a, b) = (clip(a), clip(b));
    (a, b.max(a))
}

/// Inclusive-bound span: centers in `[lo, hi]`.
fn closed_span(lo: f64, hi: f64, n: usize) -> (usize, usize) {
    let a = (lo - 0.5).ceil();
    let b = (hi - 0.5).floor() + 1.0;
    let clip = |v: f64| v.clamp(0.0, n as f64) as usize;
    if a.is_nan() || b.is_nan() {
        return (0, 0);
    }
    let (a, b) = (clip(a), clip(b));
    (a, b.max(a))
}

fn blend(dst: &mut [u8], src: Rgba8) {
    let sa = src.a as u32;
    if sa == 255 {
        dst.copy_from_slice(&src.to_array());
        return;
    }
    if sa == 0 {
        return;
    }
    let da = dst[3] as u32;
    // Alpha scaled by 255^2.
    let oa = sa * 255 + da * (255 - sa);
    if oa == 0 {
        dst.copy_from_slice(&[0, 0, 0, 0]);
        return;
    }
    let mix = |s: u8, d: u8| {
        let num = s as u32 * sa * 255 + d as u32 * da * (255 - sa);
        ((2 * num + oa) / (2 * oa)) as u8
    };
    dst[0] = mix(src.r, dst[0]);
    dst[1] = mix(src.g, dst[1]);
    dst[2] = mix(src.b, dst[2]);
    dst[3] = ((oa + 127) / 255) as u8;
}

fn dist2_to_segment(p: Point, a: Point, b: Point) -> f64 {
    let (abx, aby) = (b.x - a.x, b.y - a.y);
    let len2 = abx * abx + aby * aby;
    let t = if len2 > 0.0 {
        (((p.x - a.x) * abx + (p.y - a.y) * aby) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (dx, dy) = (p.x - (a.x + t * abx), p.y - (a.y + t * aby));
    dx * dx + dy * dy
}

impl Canvas {
    fn new(width: u32, height: u32, background: Rgba8) -> Self {
        let (width, height) = (width as usize, height as usize);
        let mut pixels = Vec::with_capacity(width * height * 4);
        for _ in 0..width * height {
            pixels.extend_from_slice(&background.to_array());
        }
        Self { width, height, pixels }
    }

    #[inline]
    fn put(&mut self, i: usize, j: usize, c: Rgba8) {
        let k = 4 * (j * self.width + i);
        blend(&mut self.pixels[k..k + 4], c);
    }

    fn fill_rect(&mut self, x: f64, y: f64, w: f64, h: f64, c: Rgba8) {
        let (i0, i1) = span(x, x + w, self.width);
        let (j0, j1) = span(y, y + h, self.height);
        for j in j0..j1 {
            for i in i0..i1 {
                self.put(i, j, c);
            }
        }
    }

    fn fill_disc(&mut self, center: Point, r: f64, c: Rgba8) {
        if !center.is_finite() {
            return;
        }
        let (i0, i1) = closed_span(center.x - r, center.x + r, self.width);
        let (j0, j1) = closed_span(center.y - r, center.y + r, self.height);
        let r2 = r * r;
        for j in j0..j1 {
            let dy = j as f64 + 0.5 - center.y;
            for i in i0..i1 {
                let dx = i as f64 + 0.5 - center.x;
                if dx * dx + dy * dy <= r2 {
                    self.put(i, j, c);
                }
            }
        }
    }

    fn draw(&mut self, p: &Primitive) {
        match p {
            Primitive::Points {
                centers,
                radius_px,
                colors,
            } => match colors {
                PointColors::Uniform(c) => {
                    for &center in centers {
                        self.fill_disc(center, *radius_px, *c);
                    }
                }
                PointColors::PerPoint(cs) => {
                    for (&center, &c) in centers.iter().zip(cs) {
                        self.fill_disc(center, *radius_px, c);
                    }
                }
            },
            Primitive::Rects { rects, color } => {
                for r in rects {
                    self.fill_rect(r.x, r.y, r.w, r.h, *color);
                }
            }
            Primitive::Polyline {
                points,
                width_px,
                color,
            } => self.stroke(points, width_px / 2.0, *color),
            Primitive::GlyphRun {
                origin,
                text,
                size_px,
                color,
                anchor,
            } => {
                let scale = glyph_scale(*size_px) as f64;
                let width = text_width_px(text, *size_px);
                let x0 = match anchor {
                    TextAnchor::Start => origin.x,
                    TextAnchor::Middle => origin.x - width / 2.0,
                    TextAnchor::End => origin.x - width,
                };
                let advance = GLYPH_SIZE as f64 * scale;
                for (k, ch) in text.chars().enumerate() {
                    let gx = x0 + k as f64 * advance;
                    for (row, bits) in glyph(ch).iter().enumerate() {
                        for col in 0..8 {
                            if bits & (1 << col) != 0 {
                                self.fill_rect(
                                    gx + col as f64 * scale,
                                    origin.y + row as f64 * scale,
                                    scale,
                                    scale,
                                    *color,
                                );
                            }
                        }
                    }
                }
            }
            Primitive::ImageBlit { dest, source, sampling } => {
                self.blit(dest.x, dest.y, dest.w, dest.h, source, *sampling)
            }
        }
    }

    fn stroke(&mut self, points: &[Point], half_width: f64, c: Rgba8) {
        let pts: Vec<Point> = points.iter().copied().filter(|p| p.is_finite()).collect();
        if pts.is_empty() {
            return;
        }
        let min_x = pts.iter().map(|p| p.x).fold(f64::INFINITY, f64::min) - half_width;
        let max_x = pts.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max) + half_width;
        let min_y = pts.iter().map(|p| p.y).fold(f64::INFINITY, f64::min) - half_width;
        let max_y = pts.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max) + half_width;
        let (i0, i1) = closed_span(min_x, max_x, self.width);
        let (j0, j1) = closed_span(min_y, max_y, self.height);
        if i0 == i1 || j0 == j1 {
            return;
        }
        // Union coverage first so self-overlapping strokes blend once.
        let mw = i1 - i0;
        let mut mask = vec![false; mw * (j1 - j0)];
        let hw2 = half_width * half_width;
        let segments: Vec<(Point, Point)> = if pts.len() == 1 {
            vec![(pts[0], pts[0])]
        } else {
            pts.windows(2).map(|w| (w[0], w[1])).collect()
        };
        for (a, b) in segments {
            let (si0, si1) = closed_span(a.x.min(b.x) - half_width, a.x.max(b.x) + half_width, self.width);
            let (sj0, sj1) = closed_span(a.y.min(b.y) - half_width, a.y.max(b.y) + half_width, self.height);
            for j in sj0..sj1 {
                for i in si0..si1 {
                    let m = (j - j0) * mw + (i - i0);
                    if mask[m] {
                        continue;
                    }
                    let p = Point::new(i as f64 + 0.5, j as f64 + 0.5);
                    if dist2_to_segment(p, a, b) <= hw2 {
                        mask[m] = true;
                    }
                }
            }
        }
        for j in j0..j1 {
            for i in i0..i1 {
                if mask[(j - j0) * mw + (i - i0)] {
                    self.put(i, j, c);
                }
            }
        }
    }

    fn blit(&mut self, x: f64, y: f64, w: f64, h: f64, src: &ImageData, sampling: Sampling) {
        let (sw, sh) = (src.width() as usize, src.height() as usize);
        if sw == 0 || sh == 0 || !(w > 0.0 && h > 0.0) {
            return;
        }
        let (i0, i1) = span(x, x + w, self.width);
        let (j0, j1) = span(y, y + h, self.height);
        for j in j0..j1 {
            let v = (j as f64 + 0.5 - y) / h * sh as f64;
            for i in i0..i1 {
                let u = (i as f64 + 0.5 - x) / w * sw as f64;
                let texel = match sampling {
                    Sampling::Nearest => {
                        let tx = (u.floor().max(0.0) as usize).min(sw - 1);
                        let ty = (v.floor().max(0.0) as usize).min(sh - 1);
                        src.texel(tx, ty)
                    }
                    Sampling::Bilinear => bilinear(src, u - 0.5, v - 0.5),
                };
                self.put(i, j, Rgba8::new(texel[0], texel[1], texel[2], texel[3]));
            }
        }
    }
}

fn bilinear(src: &ImageData, fx: f64, fy: f64) -> [u8; 4] {
    let (sw, sh) = (src.width() as f64, src.height() as f64);
    let fx = fx.clamp(0.0, sw - 1.0);
    let fy = fy.clamp(0.0, sh - 1.0);
    let (x0, y0) = (fx.floor(), fy.floor());
    let (tx, ty) = (fx - x0, fy - y0);
    let (x0, y0) = (x0 as usize, y0 as usize);
    let x1 = (x0 + 1).min(src.width() as usize - 1);
    let y1 = (y0 + 1).min(src.height() as usize - 1);
    let (a, b, c, d) = (
        src.texel(x0, y0),
        src.texel(x1, y0),
        src.texel(x0, y1),
        src.texel(x1, y1),
    );
    let mut out = [0u8; 4];
    for k in 0..4 {
        let top = a[k] as f64 * (1.0 - tx) + b[k] as f64 * tx;
        let bottom = c[k] as f64 * (1.0 - tx) + d[k] as f64 * tx;
        let v = top * (1.0 - ty) + bottom * ty;
        out[k] = (v + 0.5).floor().clamp(0.0, 255.0) as u8;
    }
    out
}
