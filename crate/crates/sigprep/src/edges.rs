//! Edge detection: Sobel, Prewitt and Roberts gradient operators plus the
//! Canny detector (gaussian blur, non-maximum suppression, double-threshold
//! hysteresis).
//!
//! Kernels (x direction; y is the transpose):
//!   sobel   (-1 0 1; -2 0 2; -1 0 1)
//!   prewitt (-1 0 1; -1 0 1; -1 0 1)
//!   roberts ((1 0; 0 -1), (0 1; -1 0)), anchored at the top-left pixel
//!
//! Borders are handled by edge-clamped extension everywhere.

use crate::error::{Error, Result};
use crate::image::{BinaryImage, Convention, GrayImage};
use crate::threshold::{histogram, otsu_threshold};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientOperator {
    Sobel,
    Prewitt,
    Roberts,
}

impl GradientOperator {
    pub fn name(self) -> &'static str {
        match self {
            GradientOperator::Sobel => "sobel",
            GradientOperator::Prewitt => "prewitt",
            GradientOperator::Roberts => "roberts",
        }
    }

    fn min_size(self) -> usize {
        match self {
            GradientOperator::Roberts => 2,
            _ => 3,
        }
    }
}

/// Per-pixel derivative estimates and gradient magnitude.
#[derive(Debug, Clone)]
pub struct GradientField {
    width: usize,
    height: usize,
    gx: Vec<f64>,
    gy: Vec<f64>,
    magnitude: Vec<f64>,
}

impl GradientField {
    fn from_derivatives(width: usize, height: usize, gx: Vec<f64>, gy: Vec<f64>) -> Self {
        let magnitude = gx.iter().zip(&gy).map(|(&x, &y)| x.hypot(y)).collect();
        Self {
            width,
            height,
            gx,
            gy,
            magnitude,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn gx(&self) -> &[f64] {
        &self.gx
    }

    pub fn gy(&self) -> &[f64] {
        &self.gy
    }

    pub fn magnitude(&self) -> &[f64] {
        &self.magnitude
    }

    pub fn magnitude_at(&self, row: usize, col: usize) -> f64 {
        self.magnitude[row * self.width + col]
    }
}

/// Canny parameters: blur width and the hysteresis threshold pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CannyParams {
    pub gaussian_sigma: f64,
    pub low: f64,
    pub high: f64,
}

pub const DEFAULT_CANNY_SIGMA: f64 = 1.4;

impl CannyParams {
    pub fn new(gaussian_sigma: f64, low: f64, high: f64) -> Result<Self> {
        if !(gaussian_sigma > 0.0) {
            return Err(Error::Parameter(format!(
                "gaussian sigma must be positive, got {gaussian_sigma}"
            )));
        }
        if !(low >= 0.0 && low < high) {
            return Err(Error::Parameter(format!(
                "hysteresis thresholds need 0 <= low < high, got low={low} high={high}"
            )));
        }
        Ok(Self {
            gaussian_sigma,
            low,
            high,
        })
    }
}

fn clamped(img: &GrayImage, r: i64, c: i64) -> f64 {
    let r = r.clamp(0, img.height() as i64 - 1) as usize;
    let c = c.clamp(0, img.width() as i64 - 1) as usize;
    img.get(r, c) as f64
}

fn clamped_raw(values: &[f64], w: usize, h: usize, r: i64, c: i64) -> f64 {
    let r = r.clamp(0, h as i64 - 1) as usize;
    let c = c.clamp(0, w as i64 - 1) as usize;
    values[r * w + c]
}

fn gradient_raw(values: &[f64], w: usize, h: usize, op: GradientOperator) -> (Vec<f64>, Vec<f64>) {
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    let at = |r: i64, c: i64| clamped_raw(values, w, h, r, c);
    match op {
        GradientOperator::Sobel | GradientOperator::Prewitt => {
            let mid = if op == GradientOperator::Sobel { 2.0 } else { 1.0 };
            for r in 0..h as i64 {
                for c in 0..w as i64 {
                    let x = (at(r - 1, c + 1) - at(r - 1, c - 1))
                        + mid * (at(r, c + 1) - at(r, c - 1))
                        + (at(r + 1, c + 1) - at(r + 1, c - 1));
                    let y = (at(r + 1, c - 1) - at(r - 1, c - 1))
                        + mid * (at(r + 1, c) - at(r - 1, c))
                        + (at(r + 1, c + 1) - at(r - 1, c + 1));
                    gx[(r as usize) * w + c as usize] = x;
                    gy[(r as usize) * w + c as usize] = y;
                }
            }
        }
        GradientOperator::Roberts => {
            for r in 0..h as i64 {
                for c in 0..w as i64 {
                    gx[(r as usize) * w + c as usize] = at(r, c) - at(r + 1, c + 1);
                    gy[(r as usize) * w + c as usize] = at(r, c + 1) - at(r + 1, c);
                }
            }
        }
    }
    (gx, gy)
}

/// Convolve with the named operator's kernel pair.
pub fn gradient(img: &GrayImage, op: GradientOperator) -> Result<GradientField> {
    let min = op.min_size();
    if img.width() < min || img.height() < min {
        return Err(Error::Dimension(format!(
            "{} needs at least {min}x{min} pixels, image is {}x{}",
            op.name(),
            img.width(),
            img.height()
        )));
    }
    let values: Vec<f64> = img.pixels().iter().map(|&p| p as f64).collect();
    let (gx, gy) = gradient_raw(&values, img.width(), img.height(), op);
    Ok(GradientField::from_derivatives(
        img.width(),
        img.height(),
        gx,
        gy,
    ))
}

/// Binary edge map: bit = 1 where magnitude strictly exceeds `t`.
pub fn threshold_edges(g: &GradientField, t: f64) -> BinaryImage {
    let bits = g.magnitude.iter().map(|&m| u8::from(m > t)).collect();
    BinaryImage::new(g.width, g.height, bits, Convention::Ink1)
        .expect("field dimensions are valid")
}

/// Otsu-select an edge threshold from the magnitude histogram, mapped back to
/// magnitude units. Returns 0 for an identically-zero field.
pub fn otsu_edge_threshold(g: &GradientField) -> f64 {
    let max = g.magnitude.iter().cloned().fold(0.0f64, f64::max);
    if max <= 0.0 {
        return 0.0;
    }
    let quantized: Vec<u8> = g
        .magnitude
        .iter()
        .map(|&m| (m / max * 255.0).round() as u8)
        .collect();
    let img = GrayImage::new(g.width, g.height, quantized).expect("field dimensions are valid");
    let t = otsu_threshold(&histogram(&img)).expect("magnitude histogram is nonempty");
    t.normalized * max
}

fn gaussian_blur(img: &GrayImage, sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as i64;
    let mut kernel = Vec::with_capacity((2 * radius + 1) as usize);
    for k in -radius..=radius {
        kernel.push((-((k * k) as f64) / (2.0 * sigma * sigma)).exp());
    }
    let sum: f64 = kernel.iter().sum();
    for w in &mut kernel {
        *w /= sum;
    }

    let (w, h) = (img.width(), img.height());
    // horizontal pass
    let mut tmp = vec![0.0; w * h];
    for r in 0..h as i64 {
        for c in 0..w as i64 {
            let mut acc = 0.0;
            for (i, &kw) in kernel.iter().enumerate() {
                acc += kw * clamped(img, r, c + i as i64 - radius);
            }
            tmp[(r as usize) * w + c as usize] = acc;
        }
    }
    // vertical pass
    let mut out = vec![0.0; w * h];
    for r in 0..h as i64 {
        for c in 0..w as i64 {
            let mut acc = 0.0;
            for (i, &kw) in kernel.iter().enumerate() {
                acc += kw * clamped_raw(&tmp, w, h, r + i as i64 - radius, c);
            }
            out[(r as usize) * w + c as usize] = acc;
        }
    }
    out
}

/// Gradient direction quantized into 4 bins at 45-degree boundaries; ties go
/// to the lower bin. Returns the raster offsets of the two neighbors along
/// the gradient axis, earlier neighbor first.
fn direction_neighbors(gx: f64, gy: f64) -> [(i64, i64); 2] {
    let mut angle = gy.atan2(gx).to_degrees();
    if angle < 0.0 {
        angle += 180.0;
    }
    if angle <= 22.5 || angle > 157.5 {
        [(0, -1), (0, 1)] // horizontal gradient: W, E
    } else if angle <= 67.5 {
        [(-1, 1), (1, -1)] // NE, SW
    } else if angle <= 112.5 {
        [(-1, 0), (1, 0)] // N, S
    } else {
        [(-1, -1), (1, 1)] // NW, SE
    }
}

/// Thin a magnitude field to local maxima along the gradient direction.
/// Plateau ties keep the earlier pixel in raster order.
fn non_maximum_suppression(mag: &[f64], gx: &[f64], gy: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut out = vec![0.0; w * h];
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            let m = mag[i];
            if m == 0.0 {
                continue;
            }
            let [first, second] = direction_neighbors(gx[i], gy[i]);
            let m1 = clamped_raw(mag, w, h, r as i64 + first.0, c as i64 + first.1);
            let m2 = clamped_raw(mag, w, h, r as i64 + second.0, c as i64 + second.1);
            if m > m1 && m >= m2 {
                out[i] = m;
            }
        }
    }
    out
}

/// Double threshold + hysteresis: strong pixels (m > high) seed a flood over
/// weak pixels (low < m <= high) through 8-connectivity.
fn hysteresis(mag: &[f64], w: usize, h: usize, low: f64, high: f64) -> BinaryImage {
    let mut bits = vec![0u8; w * h];
    let mut stack = Vec::new();
    for i in 0..w * h {
        if mag[i] > high && bits[i] == 0 {
            bits[i] = 1;
            stack.push(i);
            while let Some(j) = stack.pop() {
                let (r, c) = (j / w, j % w);
                for dr in -1i64..=1 {
                    for dc in -1i64..=1 {
                        if dr == 0 && dc == 0 {
                            continue;
                        }
                        let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                        if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                            continue;
                        }
                        let n = (nr as usize) * w + nc as usize;
                        if bits[n] == 0 && mag[n] > low {
                            bits[n] = 1;
                            stack.push(n);
                        }
                    }
                }
            }
        }
    }
    BinaryImage::new(w, h, bits, Convention::Ink1).expect("dimensions are valid")
}

fn canny_core(img: &GrayImage, sigma: f64, thresholds: Option<(f64, f64)>) -> Result<BinaryImage> {
    let (w, h) = (img.width(), img.height());
    if w < 3 || h < 3 {
        return Err(Error::Dimension(format!(
            "canny needs at least 3x3 pixels, image is {w}x{h}"
        )));
    }
    let blurred = gaussian_blur(img, sigma);
    let (gx, gy) = gradient_raw(&blurred, w, h, GradientOperator::Sobel);
    let mag: Vec<f64> = gx.iter().zip(&gy).map(|(&x, &y)| x.hypot(y)).collect();

    let (low, high) = match thresholds {
        Some(pair) => pair,
        None => {
            // per-image seeding: T from Otsu over the magnitude histogram
            let max = mag.iter().cloned().fold(0.0f64, f64::max);
            if max <= 0.0 {
                (0.0, 0.0)
            } else {
                let quantized: Vec<u8> = mag
                    .iter()
                    .map(|&m| (m / max * 255.0).round() as u8)
                    .collect();
                let q = GrayImage::new(w, h, quantized)?;
                let t = otsu_threshold(&histogram(&q))?;
                let high = t.normalized * max;
                (0.4 * high, high)
            }
        }
    };

    let thinned = non_maximum_suppression(&mag, &gx, &gy, w, h);
    Ok(hysteresis(&thinned, w, h, low, high))
}

/// Canny with explicit parameters.
pub fn canny(img: &GrayImage, params: &CannyParams) -> Result<BinaryImage> {
    CannyParams::new(params.gaussian_sigma, params.low, params.high)?;
    canny_core(img, params.gaussian_sigma, Some((params.low, params.high)))
}

/// Canny with per-image thresholds: high = Otsu level of the blurred-gradient
/// magnitude histogram, low = 0.4 * high.
pub fn canny_auto(img: &GrayImage, sigma: f64) -> Result<BinaryImage> {
    if !(sigma > 0.0) {
        return Err(Error::Parameter(format!(
            "gaussian sigma must be positive, got {sigma}"
        )));
    }
    canny_core(img, sigma, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vertical_step(w: usize, h: usize) -> GrayImage {
        let mut img = GrayImage::filled(w, h, 0).unwrap();
        for r in 0..h {
            for c in w / 2..w {
                img.set(r, c, 255);
            }
        }
        img
    }

    #[test]
    fn constant_image_has_zero_gradient() {
        let img = GrayImage::filled(6, 5, 77).unwrap();
        for op in [
            GradientOperator::Sobel,
            GradientOperator::Prewitt,
            GradientOperator::Roberts,
        ] {
            let g = gradient(&img, op).unwrap();
            assert!(g.gx().iter().all(|&v| v == 0.0));
            assert!(g.gy().iter().all(|&v| v == 0.0));
            assert!(g.magnitude().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn sobel_step_response_hand_convolved() {
        // step between cols 3 and 4: |gx| = 4*255 exactly on the flanking
        // columns, 0 elsewhere; gy = 0 everywhere (clamped rows).
        let img = vertical_step(8, 8);
        let g = gradient(&img, GradientOperator::Sobel).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                let i = r * 8 + c;
                let expected = if c == 3 || c == 4 { 1020.0 } else { 0.0 };
                assert_eq!(g.gx()[i], expected, "gx at ({r},{c})");
                assert_eq!(g.gy()[i], 0.0, "gy at ({r},{c})");
            }
        }
    }

    #[test]
    fn prewitt_step_response_matches_sobel_support() {
        let img = vertical_step(8, 8);
        let g = gradient(&img, GradientOperator::Prewitt).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                let i = r * 8 + c;
                let expected = if c == 3 || c == 4 { 765.0 } else { 0.0 };
                assert_eq!(g.gx()[i].abs(), expected, "gx at ({r},{c})");
            }
        }
    }

    #[test]
    fn magnitude_is_hypot_of_derivatives() {
        let img = vertical_step(8, 8);
        let g = gradient(&img, GradientOperator::Sobel).unwrap();
        for i in 0..64 {
            let expected = (g.gx()[i].powi(2) + g.gy()[i].powi(2)).sqrt();
            let m = g.magnitude()[i];
            assert!((m - expected).abs() <= 1e-9 * expected.max(1.0));
        }
    }

    #[test]
    fn too_small_image_is_dimension_error() {
        let img = GrayImage::filled(2, 2, 0).unwrap();
        assert!(gradient(&img, GradientOperator::Sobel).is_err());
        assert!(gradient(&img, GradientOperator::Prewitt).is_err());
        assert!(gradient(&img, GradientOperator::Roberts).is_ok());
        let tiny = GrayImage::filled(1, 1, 0).unwrap();
        assert!(gradient(&tiny, GradientOperator::Roberts).is_err());
    }

    #[test]
    fn threshold_edges_strict_comparison() {
        let img = vertical_step(8, 8);
        let g = gradient(&img, GradientOperator::Sobel).unwrap();
        let edges = threshold_edges(&g, 510.0);
        for r in 0..8 {
            for c in 0..8 {
                let expected = u8::from(c == 3 || c == 4);
                assert_eq!(edges.get(r, c), expected);
            }
        }
        // zero field, threshold zero: nothing exceeds strictly
        let flat = GrayImage::filled(4, 4, 9).unwrap();
        let g = gradient(&flat, GradientOperator::Sobel).unwrap();
        assert_eq!(threshold_edges(&g, 0.0).count_ones(), 0);
    }

    #[test]
    fn canny_rejects_inverted_thresholds() {
        assert!(CannyParams::new(1.4, 10.0, 5.0).is_err());
        assert!(CannyParams::new(1.4, 5.0, 5.0).is_err());
        assert!(CannyParams::new(0.0, 1.0, 2.0).is_err());
        assert!(CannyParams::new(1.4, 0.0, 5.0).is_ok());
    }

    #[test]
    fn canny_constant_image_is_empty() {
        let img = GrayImage::filled(16, 16, 128).unwrap();
        let params = CannyParams::new(1.4, 10.0, 30.0).unwrap();
        assert_eq!(canny(&img, &params).unwrap().count_ones(), 0);
        assert_eq!(canny_auto(&img, 1.4).unwrap().count_ones(), 0);
    }

    #[test]
    fn canny_step_is_single_pixel_wide_and_connected() {
        let img = vertical_step(16, 12);
        let out = canny_auto(&img, 1.4).unwrap();
        // every row carries exactly one edge pixel
        for r in 0..12 {
            let row_count: usize = (0..16).map(|c| out.get(r, c) as usize).sum();
            assert_eq!(row_count, 1, "row {r} should have exactly one edge pixel");
        }
        // and the column is consistent (a straight 8-connected line)
        let cols: Vec<usize> = (0..12)
            .map(|r| (0..16).find(|&c| out.get(r, c) == 1).unwrap())
            .collect();
        for pair in cols.windows(2) {
            assert!(pair[0].abs_diff(pair[1]) <= 1);
        }
    }

    #[test]
    fn canny_weak_only_field_is_dropped() {
        // faint step: max magnitude M; with high >= M nothing is strong.
        let mut img = GrayImage::filled(12, 12, 100).unwrap();
        for r in 0..12 {
            for c in 6..12 {
                img.set(r, c, 110);
            }
        }
        let strong = canny(&img, &CannyParams::new(1.4, 1.0, 5.0).unwrap()).unwrap();
        assert!(strong.count_ones() > 0, "sanity: edge exists at low high");
        let params = CannyParams::new(1.4, 0.5, 1e6).unwrap();
        assert_eq!(canny(&img, &params).unwrap().count_ones(), 0);
    }

    #[test]
    fn otsu_edge_threshold_zero_field() {
        let img = GrayImage::filled(8, 8, 42).unwrap();
        let g = gradient(&img, GradientOperator::Sobel).unwrap();
        assert_eq!(otsu_edge_threshold(&g), 0.0);
    }
}
