//! Embedded 8x8 monospace bitmap font used for glyph runs in bitmap output.

use font8x8::legacy::BASIC_LEGACY;

/// Base glyph cell size in pixels.
pub const GLYPH_SIZE: u32 = 8;

/// Integer upscale factor for a requested text size.
pub fn glyph_scale(size_px: f64) -> u32 {
    let s = (size_px / GLYPH_SIZE as f64).round();
    if s.is_finite() && s >= 1.0 {
        s.min(64.0) as u32
    } else {
        1
    }
}

/// Advance width of `text` at `size_px`, in pixels.
pub fn text_width_px(text: &str, size_px: f64) -> f64 {
    (text.chars().count() as u32 * GLYPH_SIZE * glyph_scale(size_px)) as f64
}

/// Row bitmaps for `c`; bit 0 of each row is the leftmost pixel.
/// Characters outside basic latin render as `?`.
pub(crate) fn glyph(c: char) -> [u8; 8] {
    let code = c as u32;
    if code < 128 {
        BASIC_LEGACY[code as usize]
    } else {
        BASIC_LEGACY[b'?' as usize]
    }
}
