//! SVG 1.1 serializer for draw lists.

use std::fmt::Write as _;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine as _;

use super::png::encode_png;
use super::{DrawList, PointColors, Primitive, Rgba8, Sampling, TextAnchor};

/// Formats a coordinate with at most 6 fractional digits, trailing zeros
/// trimmed. Non-finite values become `0`.
pub fn format_number(v: f64) -> String {
    if !v.is_finite() {
        return "0".to_string();
    }
    let mut s = format!("{v:.6}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

fn escape_into(out: &mut String, text: &str) {
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            // Control characters are not allowed in XML 1.0.
            c if (c as u32) < 0x20 && !matches!(c, '\t' | '\n' | '\r') => out.push('?'),
            c => out.push(c),
        }
    }
}

fn paint(out: &mut String, attr: &str, c: Rgba8) {
    let _ = write!(out, r#" {attr}="{}""#, c.to_hex_rgb());
    if c.a != 255 {
        let _ = write!(out, r#" {attr}-opacity="{}""#, format_number(c.a as f64 / 255.0));
    }
}

/// Serializes `dl` as a standalone SVG document. The first child is always
/// the background rect; every later element corresponds to one logical
/// shape, in draw-list order.
pub fn to_svg(dl: &DrawList, width: u32, height: u32, background: Rgba8) -> String {
    let mut out = String::with_capacity(256 + dl.len() * 64);
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    out.push_str(r#"<rect x="0" y="0""#);
    let _ = write!(out, r#" width="{width}" height="{height}""#);
    paint(&mut out, "fill", background);
    out.push_str("/>");

    let n = format_number;
    for p in dl.primitives() {
        match p {
            Primitive::Points {
                centers,
                radius_px,
                colors,
            } => {
                let r = n(*radius_px);
                for (k, c) in centers.iter().enumerate() {
                    let color = match colors {
                        PointColors::Uniform(c) => *c,
                        PointColors::PerPoint(cs) => cs[k],
                    };
                    let _ = write!(out, r#"<circle cx="{}" cy="{}" r="{r}""#, n(c.x), n(c.y));
                    paint(&mut out, "fill", color);
                    out.push_str("/>");
                }
            }
            Primitive::Polyline {
                points,
                width_px,
                color,
            } => {
                out.push_str(r#"<polyline points=""#);
                for (k, p) in points.iter().enumerate() {
                    if k > 0 {
                        out.push(' ');
                    }
                    let _ = write!(out, "{},{}", n(p.x), n(p.y));
                }
                let _ = write!(out, r#"" fill="none" stroke-width="{}""#, n(*width_px));
                paint(&mut out, "stroke", *color);
                out.push_str(r#" stroke-linecap="round" stroke-linejoin="round"/>"#);
            }
            Primitive::Rects { rects, color } => {
                for r in rects {
                    let _ = write!(
                        out,
                        r#"<rect x="{}" y="{}" width="{}" height="{}""#,
                        n(r.x),
                        n(r.y),
                        n(r.w),
                        n(r.h)
                    );
                    paint(&mut out, "fill", *color);
                    out.push_str("/>");
                }
            }
            Primitive::GlyphRun {
                origin,
                text,
                size_px,
                color,
                anchor,
            } => {
                let anchor = match anchor {
                    TextAnchor::Start => "start",
                    TextAnchor::Middle => "middle",
                    TextAnchor::End => "end",
                };
                let _ = write!(
                    out,
                    r#"<text x="{}" y="{}" font-family="monospace" font-size="{}" text-anchor="{anchor}" dominant-baseline="hanging""#,
                    n(origin.x),
                    n(origin.y),
                    n(*size_px)
                );
                paint(&mut out, "fill", *color);
                out.push('>');
                escape_into(&mut out, text);
                out.push_str("</text>");
            }
            Primitive::ImageBlit { dest, source, sampling } => {
                let png = encode_png(source.width(), source.height(), source.pixels())
                    .expect("ImageData length is validated on construction");
                let rendering = match sampling {
                    Sampling::Nearest => "optimizeSpeed",
                    Sampling::Bilinear => "optimizeQuality",
                };
                let _ = write!(
                    out,
                    r#"<image x="{}" y="{}" width="{}" height="{}" preserveAspectRatio="none" image-rendering="{rendering}" xlink:href="data:image/png;base64,{}"/>"#,
                    n(dest.x),
                    n(dest.y),
                    n(dest.w),
                    n(dest.h),
                    BASE64.encode(png)
                );
            }
        }
    }
    out.push_str("</svg>");
    out
}
