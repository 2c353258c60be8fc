//! Core raster types shared by every stage: RGB, grayscale and binary images,
//! color-to-gray conversion, bilinear resizing, and binary inversion.
//!
//! Coordinates are `(row, col)` with row 0 at the top. All float-to-intensity
//! conversions round half away from zero (`f64::round`) and clamp to `[0, 255]`.

use crate::error::{Error, Result};

/// Foreground semantics of a [`BinaryImage`].
///
/// Binarizing a scanned signature yields `Background1` (white paper maps to 1);
/// morphology and cropping operate on `Ink1`. [`invert`] converts between them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// 1-bits are ink (foreground).
    Ink1,
    /// 1-bits are background (white paper).
    Background1,
}

/// 24-bit color raster, row-major RGB triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

/// 8-bit intensity raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

/// Bitmask raster with an explicit foreground convention. Bits are stored
/// one per byte with values in `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    bits: Vec<u8>,
    convention: Convention,
}

/// Round half away from zero, then clamp into intensity range.
pub(crate) fn to_intensity(x: f64) -> u8 {
    x.round().clamp(0.0, 255.0) as u8
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::Dimension(format!(
            "image dimensions must be at least 1x1, got {width}x{height}"
        )));
    }
    Ok(())
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        if pixels.len() != width * height * 3 {
            return Err(Error::Dimension(format!(
                "pixel buffer length {} does not match {width}x{height}x3",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Constant-color image.
    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        check_dims(width, height)?;
        let mut pixels = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            pixels.extend_from_slice(&rgb);
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Row-major interleaved RGB bytes.
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> [u8; 3] {
        let i = (row * self.width + col) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set(&mut self, row: usize, col: usize, rgb: [u8; 3]) {
        let i = (row * self.width + col) * 3;
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    /// Extract one channel (0 = R, 1 = G, 2 = B) as a grayscale image.
    pub fn channel(&self, idx: usize) -> GrayImage {
        assert!(idx < 3, "channel index must be 0, 1 or 2");
        let pixels = self.pixels[idx..].iter().step_by(3).copied().collect();
        GrayImage {
            width: self.width,
            height: self.height,
            pixels,
        }
    }
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        if pixels.len() != width * height {
            return Err(Error::Dimension(format!(
                "pixel buffer length {} does not match {width}x{height}",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            pixels: vec![value; width * height],
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.pixels[row * self.width + col] = value;
    }
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, bits: Vec<u8>, convention: Convention) -> Result<Self> {
        check_dims(width, height)?;
        if bits.len() != width * height {
            return Err(Error::Dimension(format!(
                "bit buffer length {} does not match {width}x{height}",
                bits.len()
            )));
        }
        if let Some(&bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Dimension(format!(
                "binary image values must be 0 or 1, got {bad}"
            )));
        }
        Ok(Self {
            width,
            height,
            bits,
            convention,
        })
    }

    pub fn filled(width: usize, height: usize, bit: u8, convention: Convention) -> Result<Self> {
        Self::new(width, height, vec![bit; width * height], convention)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Row-major bits, one byte per pixel, values in `{0, 1}`.
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.bits[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, bit: u8) {
        debug_assert!(bit <= 1);
        self.bits[row * self.width + col] = bit;
    }

    /// Number of 1-bits.
    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Reject images whose foreground convention differs from `expected`.
    pub fn require_convention(&self, expected: Convention) -> Result<()> {
        if self.convention != expected {
            return Err(Error::Convention {
                expected,
                actual: self.convention,
            });
        }
        Ok(())
    }
}

/// ITU-R BT.601 luminance conversion: `round(0.299 R + 0.587 G + 0.114 B)`.
pub fn rgb_to_gray(img: &RgbImage) -> GrayImage {
    let pixels = img
        .pixels
        .chunks_exact(3)
        .map(|p| to_intensity(0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64))
        .collect();
    GrayImage {
        width: img.width,
        height: img.height,
        pixels,
    }
}

/// Bilinear resize with edge-clamped sampling.
///
/// Samples are taken at pixel centers, so resizing to identical dimensions
/// reproduces the input exactly.
pub fn resize_bilinear(img: &GrayImage, out_h: usize, out_w: usize) -> Result<GrayImage> {
    check_dims(out_w, out_h)?;
    let (in_w, in_h) = (img.width, img.height);
    let scale_y = in_h as f64 / out_h as f64;
    let scale_x = in_w as f64 / out_w as f64;

    let mut pixels = Vec::with_capacity(out_w * out_h);
    for r in 0..out_h {
        let sy = ((r as f64 + 0.5) * scale_y - 0.5).clamp(0.0, (in_h - 1) as f64);
        let y0 = sy.floor() as usize;
        let y1 = (y0 + 1).min(in_h - 1);
        let fy = sy - y0 as f64;
        for c in 0..out_w {
            let sx = ((c as f64 + 0.5) * scale_x - 0.5).clamp(0.0, (in_w - 1) as f64);
            let x0 = sx.floor() as usize;
            let x1 = (x0 + 1).min(in_w - 1);
            let fx = sx - x0 as f64;

            let p00 = img.get(y0, x0) as f64;
            let p01 = img.get(y0, x1) as f64;
            let p10 = img.get(y1, x0) as f64;
            let p11 = img.get(y1, x1) as f64;
            let top = p00 + (p01 - p00) * fx;
            let bottom = p10 + (p11 - p10) * fx;
            pixels.push(to_intensity(top + (bottom - top) * fy));
        }
    }
    GrayImage::new(out_w, out_h, pixels)
}

/// Flip every bit and toggle the foreground convention.
pub fn invert(img: &BinaryImage) -> BinaryImage {
    BinaryImage {
        width: img.width,
        height: img.height,
        bits: img.bits.iter().map(|&b| 1 - b).collect(),
        convention: match img.convention {
            Convention::Ink1 => Convention::Background1,
            Convention::Background1 => Convention::Ink1,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_conversion_black_and_white() {
        let black = RgbImage::filled(1, 1, [0, 0, 0]).unwrap();
        assert_eq!(rgb_to_gray(&black).get(0, 0), 0);
        let white = RgbImage::filled(1, 1, [255, 255, 255]).unwrap();
        assert_eq!(rgb_to_gray(&white).get(0, 0), 255);
    }

    #[test]
    fn gray_conversion_pure_red() {
        // 0.299 * 255 = 76.245 -> 76
        let red = RgbImage::filled(1, 1, [255, 0, 0]).unwrap();
        assert_eq!(rgb_to_gray(&red).get(0, 0), 76);
    }

    #[test]
    fn resize_identity_is_exact() {
        let img = GrayImage::new(3, 2, vec![10, 20, 30, 40, 50, 60]).unwrap();
        let out = resize_bilinear(&img, 2, 3).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn resize_target_dimensions() {
        let img = GrayImage::filled(610, 410, 200).unwrap();
        let out = resize_bilinear(&img, 128, 256).unwrap();
        assert_eq!((out.height(), out.width()), (128, 256));
    }

    #[test]
    fn resize_zero_dimension_is_error() {
        let img = GrayImage::filled(4, 4, 0).unwrap();
        assert!(matches!(
            resize_bilinear(&img, 0, 4),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            resize_bilinear(&img, 4, 0),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn resize_step_row_hand_evaluated() {
        // 2x2 [[0,255],[0,255]] to 2x4: sample positions -0.25, 0.25, 0.75, 1.25
        // clamp to [0,1]; weights give 0, 63.75, 191.25, 255.
        let img = GrayImage::new(2, 2, vec![0, 255, 0, 255]).unwrap();
        let out = resize_bilinear(&img, 2, 4).unwrap();
        for r in 0..2 {
            let row: Vec<u8> = (0..4).map(|c| out.get(r, c)).collect();
            assert_eq!(row, vec![0, 64, 191, 255]);
            assert!(row.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn invert_flips_bits_and_convention() {
        let img = BinaryImage::filled(3, 2, 0, Convention::Ink1).unwrap();
        let inv = invert(&img);
        assert!(inv.bits().iter().all(|&b| b == 1));
        assert_eq!(inv.convention(), Convention::Background1);
        assert_eq!(invert(&inv), img);
    }

    #[test]
    fn invert_fig2_style_background_patch() {
        // an all-ones background=1 patch becomes all-zero ink=1
        let patch = BinaryImage::filled(3, 9, 1, Convention::Background1).unwrap();
        let ink = invert(&patch);
        assert_eq!(ink.convention(), Convention::Ink1);
        assert_eq!(ink.count_ones(), 0);
    }

    #[test]
    fn binary_rejects_non_bit_values() {
        assert!(BinaryImage::new(2, 1, vec![0, 2], Convention::Ink1).is_err());
    }

    #[test]
    fn convention_check() {
        let img = BinaryImage::filled(2, 2, 1, Convention::Background1).unwrap();
        assert!(matches!(
            img.require_convention(Convention::Ink1),
            Err(Error::Convention { .. })
        ));
        assert!(img.require_convention(Convention::Background1).is_ok());
    }

    #[test]
    fn channel_extraction() {
        let img = RgbImage::new(2, 1, vec![1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(img.channel(0).pixels(), &[1, 4]);
        assert_eq!(img.channel(1).pixels(), &[2, 5]);
        assert_eq!(img.channel(2).pixels(), &[3, 6]);
    }
}
