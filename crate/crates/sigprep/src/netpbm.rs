//! Bit-exact binary netpbm I/O: P4 (bitmap), P5 (graymap), P6 (pixmap).
//!
//! P5/P6 require maxval 255. P4 rows are padded to a byte boundary, most
//! significant bit first, and the format's "1 = black" is mapped to ink = 1:
//! reading always yields an [`Convention::Ink1`] image, and writing a
//! `Background1` image stores its ink (0-bits) as 1s on disk.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::{BinaryImage, Convention, GrayImage, RgbImage};

/// Any of the three raster kinds a netpbm file can hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyImage {
    Rgb(RgbImage),
    Gray(GrayImage),
    Binary(BinaryImage),
}

impl AnyImage {
    pub fn width(&self) -> usize {
        match self {
            AnyImage::Rgb(i) => i.width(),
            AnyImage::Gray(i) => i.width(),
            AnyImage::Binary(i) => i.width(),
        }
    }

    pub fn height(&self) -> usize {
        match self {
            AnyImage::Rgb(i) => i.height(),
            AnyImage::Gray(i) => i.height(),
            AnyImage::Binary(i) => i.height(),
        }
    }
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, reason: impl Into<String>) -> Error {
        Error::Format {
            offset: self.pos,
            reason: reason.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.data.get(self.pos).copied()
    }

    /// Skip whitespace and `#` comments (comment runs to end of line).
    fn skip_separators(&mut self) {
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(b) = self.peek() {
                    self.pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    /// Read an unsigned decimal header token.
    fn read_number(&mut self, what: &str) -> Result<usize> {
        self.skip_separators();
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err(format!("expected {what}")));
        }
        let text = std::str::from_utf8(&self.data[start..self.pos]).expect("digits are ascii");
        text.parse::<usize>().map_err(|_| Error::Format {
            offset: start,
            reason: format!("{what} out of range"),
        })
    }

    /// Consume the single whitespace byte that separates header from raster.
    fn expect_raster_separator(&mut self) -> Result<()> {
        match self.peek() {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err("expected single whitespace before raster data")),
        }
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            let missing = self.pos + n - self.data.len();
            self.pos = self.data.len();
            return Err(self.err(format!("truncated {what}: {missing} bytes missing")));
        }
        let slice = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }
}

/// Decode a netpbm byte buffer, dispatching on the magic number.
pub fn decode(data: &[u8]) -> Result<AnyImage> {
    let mut cur = Cursor { data, pos: 0 };
    let magic = cur.take(2, "magic number")?;
    let magic = match magic {
        b"P4" | b"P5" | b"P6" => magic[1],
        _ => {
            return Err(Error::Format {
                offset: 0,
                reason: format!("unsupported magic number {:?}", String::from_utf8_lossy(magic)),
            })
        }
    };
    let width = cur.read_number("width")?;
    let height = cur.read_number("height")?;
    if width == 0 || height == 0 {
        return Err(Error::Format {
            offset: cur.pos,
            reason: format!("dimensions must be positive, got {width}x{height}"),
        });
    }
    if magic != b'4' {
        let maxval_at = {
            cur.skip_separators();
            cur.pos
        };
        let maxval = cur.read_number("maxval")?;
        if maxval != 255 {
            return Err(Error::Format {
                offset: maxval_at,
                reason: format!("unsupported maxval {maxval}, only 255 is accepted"),
            });
        }
    }
    cur.expect_raster_separator()?;

    match magic {
        b'4' => {
            let row_bytes = width.div_ceil(8);
            let raster = cur.take(row_bytes * height, "P4 raster")?;
            let mut bits = Vec::with_capacity(width * height);
            for row in raster.chunks_exact(row_bytes) {
                for c in 0..width {
                    let byte = row[c / 8];
                    bits.push((byte >> (7 - c % 8)) & 1);
                }
            }
            // P4: 1 = black = ink.
            Ok(AnyImage::Binary(BinaryImage::new(
                width,
                height,
                bits,
                Convention::Ink1,
            )?))
        }
        b'5' => {
            let raster = cur.take(width * height, "P5 raster")?;
            Ok(AnyImage::Gray(GrayImage::new(
                width,
                height,
                raster.to_vec(),
            )?))
        }
        b'6' => {
            let raster = cur.take(width * height * 3, "P6 raster")?;
            Ok(AnyImage::Rgb(RgbImage::new(width, height, raster.to_vec())?))
        }
        _ => unreachable!(),
    }
}

pub fn encode_rgb(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

pub fn encode_gray(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

pub fn encode_binary(img: &BinaryImage) -> Vec<u8> {
    let mut out = format!("P4\n{} {}\n", img.width(), img.height()).into_bytes();
    // Stored bit means black ink regardless of the in-memory convention.
    let ink_is_one = img.convention() == Convention::Ink1;
    let row_bytes = img.width().div_ceil(8);
    for r in 0..img.height() {
        let mut row = vec![0u8; row_bytes];
        for c in 0..img.width() {
            let bit = img.get(r, c);
            let ink = if ink_is_one { bit } else { 1 - bit };
            if ink == 1 {
                row[c / 8] |= 1 << (7 - c % 8);
            }
        }
        out.extend_from_slice(&row);
    }
    out
}

pub fn encode(img: &AnyImage) -> Vec<u8> {
    match img {
        AnyImage::Rgb(i) => encode_rgb(i),
        AnyImage::Gray(i) => encode_gray(i),
        AnyImage::Binary(i) => encode_binary(i),
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn read_image(path: impl AsRef<Path>) -> Result<AnyImage> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|e| io_err(path, e))?;
    decode(&data)
}

pub fn write_image(img: &AnyImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(img)).map_err(|e| io_err(path, e))
}

pub fn write_rgb(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_rgb(img)).map_err(|e| io_err(path, e))
}

pub fn write_gray(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_gray(img)).map_err(|e| io_err(path, e))
}

pub fn write_binary(img: &BinaryImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_binary(img)).map_err(|e| io_err(path, e))
}
