use std::path::Path;

use image::{ImageError, ImageReader};

use super::IoError;
use crate::metrics::{luma, GrayImage};

const DYNAMIC_RANGE: f64 = 255.0;

/// Decode a PNG or JPEG into a gray image with intensities in `[0, 255]`.
/// Color images are reduced with fixed luma weights.
pub fn decode_image(path: &Path) -> Result<GrayImage, IoError> {
    let reader = ImageReader::open(path)
        .map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => IoError::MissingFile(path.to_path_buf()),
            _ => IoError::Io { path: path.to_path_buf(), source: e },
        })?
        .with_guessed_format()
        .map_err(|source| IoError::Io { path: path.to_path_buf(), source })?;
    match reader.format() {
        Some(image::ImageFormat::Png | image::ImageFormat::Jpeg) => {}
        _ => return Err(IoError::UnsupportedFormat(path.to_path_buf())),
    }
    let decoded = reader.decode().map_err(|e| match e {
        ImageError::Unsupported(_) => IoError::UnsupportedFormat(path.to_path_buf()),
        other => IoError::CorruptImage { path: path.to_path_buf(), message: other.to_string() },
    })?;
    let rgb = decoded.to_rgb8();
    let (w, h) = rgb.dimensions();
    let pixels = rgb
        .pixels()
        .map(|p| {
            let [r, g, b] = p.0.map(f64::from);
            luma(r, g, b).clamp(0.0, DYNAMIC_RANGE)
        })
        .collect();
    GrayImage::new(w as usize, h as usize, pixels, DYNAMIC_RANGE)
        .map_err(|e| IoError::CorruptImage { path: path.to_path_buf(), message: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::{Rgb, RgbImage};

    fn png(dir: &Path, name: &str, w: u32, h: u32, px: [u8; 3]) -> std::path::PathBuf {
        let p = dir.join(name);
        RgbImage::from_pixel(w, h, Rgb(px)).save(&p).unwrap();
        p
    }

    #[test]
    fn solid_colors() {
        let dir = tempfile::tempdir().unwrap();
        let white = decode_image(&png(dir.path(), "w.png", 2, 2, [255; 3])).unwrap();
        assert!(white.pixels().iter().all(|&v| (v - 255.0).abs() < 1e-9));
        let black = decode_image(&png(dir.path(), "b.png", 2, 2, [0; 3])).unwrap();
        assert!(black.pixels().iter().all(|&v| v == 0.0));
        let red = decode_image(&png(dir.path(), "r.png", 1, 1, [255, 0, 0])).unwrap();
        assert!((red.pixels()[0] - 76.245).abs() < 1e-9);
        assert_eq!(red.dynamic_range(), 255.0);
    }

    #[test]
    fn jpeg_decodes() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.jpg");
        RgbImage::from_pixel(8, 8, Rgb([128, 128, 128])).save(&p).unwrap();
        let img = decode_image(&p).unwrap();
        assert_eq!((img.width(), img.height()), (8, 8));
        assert!(img.pixels().iter().all(|&v| (v - 128.0).abs() < 3.0));
    }

    #[test]
    fn bad_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let text = dir.path().join("x.txt");
        std::fs::write(&text, "not an image at all").unwrap();
        assert!(matches!(decode_image(&text), Err(IoError::UnsupportedFormat(_))));
        let gif = dir.path().join("g.png");
        std::fs::write(&gif, b"GIF89a\x01\x00\x01\x00\x00\x00\x00;").unwrap();
        assert!(matches!(decode_image(&gif), Err(IoError::UnsupportedFormat(_))));
        let truncated = dir.path().join("t.png");
        let full = std::fs::read(png(dir.path(), "ok.png", 16, 16, [9, 9, 9])).unwrap();
        std::fs::write(&truncated, &full[..full.len() / 2]).unwrap();
        assert!(matches!(decode_image(&truncated), Err(IoError::CorruptImage { .. })));
        assert!(matches!(decode_image(&dir.path().join("none.png")), Err(IoError::MissingFile(_))));
    }
}
