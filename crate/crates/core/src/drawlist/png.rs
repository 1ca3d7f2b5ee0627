//! Lossless 8-bit RGBA PNG encoding.

use thiserror::Error;

pub const PNG_SIGNATURE: [u8; 8] = [0x89, 0x50, 0x4E, 0x47, 0x0D, 0x0A, 0x1A, 0x0A];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PngError {
    #[error("pixel buffer has {actual} bytes, expected {expected} for {width}x{height} RGBA8")]
    Length {
        width: u32,
        height: u32,
        expected: usize,
        actual: usize,
    },
    #[error("png dimensions must be non-zero, got {width}x{height}")]
    ZeroSize { width: u32, height: u32 },
    #[error("png encoding failed: {0}")]
    Encoding(String),
}

pub fn encode_png(width: u32, height: u32, pixels: &[u8]) -> Result<Vec<u8>, PngError> {
    if width == 0 || height == 0 {
        return Err(PngError::ZeroSize { width, height });
    }
    let expected = 4 * width as usize * height as usize;
    if pixels.len() != expected {
        return Err(PngError::Length {
            width,
            height,
            expected,
            actual: pixels.len(),
        });
    }
    let enc = |e: png::EncodingError| PngError::Encoding(e.to_string());
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, width, height);
        encoder.set_color(png::ColorType::Rgba);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder.write_header().map_err(enc)?;
        writer.write_image_data(pixels).map_err(enc)?;
        writer.finish().map_err(enc)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signature_and_mismatch() {
        let bytes = encode_png(1, 1, &[255, 0, 0, 255]).unwrap();
        assert_eq!(bytes[..8], PNG_SIGNATURE);
        assert!(matches!(
            encode_png(2, 2, &[0; 15]),
            Err(PngError::Length { expected: 16, .. })
        ));
        assert!(matches!(encode_png(0, 2, &[]), Err(PngError::ZeroSize { .. })));
    }
}
