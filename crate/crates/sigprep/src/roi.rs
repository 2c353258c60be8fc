//! Content-based auto-cropping: find the extent of the inked foreground and
//! cut the image down to it.

use crate::error::{Error, Result};
use crate::image::{BinaryImage, Convention, GrayImage};

/// Inclusive foreground extent. `min_*` is the upper-left corner, `max_*`
/// the lower-right; extents are `max - min + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundingBox {
    pub min_row: usize,
    pub min_col: usize,
    pub max_row: usize,
    pub max_col: usize,
}

impl BoundingBox {
    pub fn height(&self) -> usize {
        self.max_row - self.min_row + 1
    }

    pub fn width(&self) -> usize {
        self.max_col - self.min_col + 1
    }

    fn check_within(&self, width: usize, height: usize) -> Result<()> {
        if self.min_row > self.max_row || self.min_col > self.max_col {
            return Err(Error::OutOfBounds(format!(
                "degenerate box rows {}..{} cols {}..{}",
                self.min_row, self.max_row, self.min_col, self.max_col
            )));
        }
        if self.max_row >= height || self.max_col >= width {
            return Err(Error::OutOfBounds(format!(
                "box rows {}..{} cols {}..{} exceeds image {}x{}",
                self.min_row, self.max_row, self.min_col, self.max_col, width, height
            )));
        }
        Ok(())
    }
}

/// Minimum and maximum row/column over all 1-bits. Errors with
/// [`Error::NoForeground`] on a blank image.
pub fn foreground_bbox(img: &BinaryImage) -> Result<BoundingBox> {
    img.require_convention(Convention::Ink1)?;
    let mut bbox: Option<BoundingBox> = None;
    for r in 0..img.height() {
        for c in 0..img.width() {
            if img.get(r, c) == 0 {
                continue;
            }
            bbox = Some(match bbox {
                None => BoundingBox {
                    min_row: r,
                    min_col: c,
                    max_row: r,
                    max_col: c,
                },
                Some(b) => BoundingBox {
                    min_row: b.min_row.min(r),
                    min_col: b.min_col.min(c),
                    max_row: b.max_row.max(r),
                    max_col: b.max_col.max(c),
                },
            });
        }
    }
    bbox.ok_or(Error::NoForeground)
}

/// Cut a binary image down to `bbox`.
pub fn crop_binary(img: &BinaryImage, bbox: &BoundingBox) -> Result<BinaryImage> {
    bbox.check_within(img.width(), img.height())?;
    let mut bits = Vec::with_capacity(bbox.width() * bbox.height());
    for r in bbox.min_row..=bbox.max_row {
        for c in bbox.min_col..=bbox.max_col {
            bits.push(img.get(r, c));
        }
    }
    BinaryImage::new(bbox.width(), bbox.height(), bits, img.convention())
}

/// Cut a gray image down to `bbox`.
pub fn crop_gray(img: &GrayImage, bbox: &BoundingBox) -> Result<GrayImage> {
    bbox.check_within(img.width(), img.height())?;
    let mut pixels = Vec::with_capacity(bbox.width() * bbox.height());
    for r in bbox.min_row..=bbox.max_row {
        for c in bbox.min_col..=bbox.max_col {
            pixels.push(img.get(r, c));
        }
    }
    GrayImage::new(bbox.width(), bbox.height(), pixels)
}

/// Crop to the tight foreground box. Every input 1-bit survives, and each of
/// the four output border lines carries at least one 1-bit.
pub fn auto_crop(img: &BinaryImage) -> Result<BinaryImage> {
    let bbox = foreground_bbox(img)?;
    crop_binary(img, &bbox)
}
