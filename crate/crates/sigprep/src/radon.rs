//! Discrete Radon transform (pixel-driven forward projection) and the timing
//! harness that uses it as a workload.
//!
//! Convention: pixel coordinates are taken relative to the exact image center
//! `((w-1)/2, (h-1)/2)`; the projection position for angle theta (degrees) is
//! `x cos(theta) + y sin(theta)`, deposited onto the two nearest integer
//! offset bins by linear interpolation. At 0 degrees the projection of an
//! odd-width image equals its column sums.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::image::{BinaryImage, GrayImage, RgbImage};

/// Radon projections over an angle set: a `|offsets| x |angles|` matrix.
#[derive(Debug, Clone)]
pub struct Sinogram {
    angles: Vec<f64>,
    offset_min: i32,
    n_offsets: usize,
    values: Vec<f64>,
}

impl Sinogram {
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn n_offsets(&self) -> usize {
        self.n_offsets
    }

    /// Signed offset of the first projection bin; bins step by 1.
    pub fn offset_min(&self) -> i32 {
        self.offset_min
    }

    /// Row-major values, offsets along rows and angles along columns.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, offset_idx: usize, angle_idx: usize) -> f64 {
        self.values[offset_idx * self.angles.len() + angle_idx]
    }

    /// Total projected mass for one angle.
    pub fn column_sum(&self, angle_idx: usize) -> f64 {
        (0..self.n_offsets).map(|o| self.value(o, angle_idx)).sum()
    }

    /// All bins of one angle, ordered by offset.
    pub fn column(&self, angle_idx: usize) -> Vec<f64> {
        (0..self.n_offsets)
            .map(|o| self.value(o, angle_idx))
            .collect()
    }
}

fn validate_angles(angles: &[f64]) -> Result<()> {
    if angles.is_empty() {
        return Err(Error::Parameter("angle list must be nonempty".into()));
    }
    if let Some(&bad) = angles.iter().find(|&&a| !(0.0..180.0).contains(&a)) {
        return Err(Error::Parameter(format!(
            "angles must lie in [0, 180), got {bad}"
        )));
    }
    Ok(())
}

/// Evenly spaced angle set `0, step, 2*step, ...` below 180 degrees.
pub fn angle_range(step: f64) -> Vec<f64> {
    let mut angles = Vec::new();
    let mut a = 0.0;
    while a < 180.0 {
        angles.push(a);
        a += step;
    }
    angles
}

struct Projection {
    offset_min: i32,
    n_offsets: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Projection {
    fn new(width: usize, height: usize, angles: &[f64]) -> Self {
        // cover the full diagonal with margin for the interpolation partner bin
        let radius = ((width as f64).hypot(height as f64) / 2.0).ceil() as i32 + 1;
        Self {
            offset_min: -radius,
            n_offsets: (2 * radius + 1) as usize,
            cos: angles.iter().map(|a| a.to_radians().cos()).collect(),
            sin: angles.iter().map(|a| a.to_radians().sin()).collect(),
        }
    }
}

fn scatter(
    proj: &Projection,
    n_angles: usize,
    values: &mut [f64],
    x: f64,
    y: f64,
    mass: f64,
    angle_idx: usize,
) {
    let s = x * proj.cos[angle_idx] + y * proj.sin[angle_idx];
    let floor = s.floor();
    let frac = s - floor;
    let bin = (floor as i32 - proj.offset_min) as usize;
    values[bin * n_angles + angle_idx] += mass * (1.0 - frac);
    values[(bin + 1) * n_angles + angle_idx] += mass * frac;
}

fn radon_raw(
    pixels: impl Fn(usize, usize) -> f64,
    width: usize,
    height: usize,
    angles: &[f64],
) -> Sinogram {
    let proj = Projection::new(width, height, angles);
    let n_angles = angles.len();
    let mut values = vec![0.0; proj.n_offsets * n_angles];
    let cx = (width as f64 - 1.0) / 2.0;
    let cy = (height as f64 - 1.0) / 2.0;
    for r in 0..height {
        let y = r as f64 - cy;
        for c in 0..width {
            let v = pixels(r, c);
            let x = c as f64 - cx;
            for a in 0..n_angles {
                scatter(&proj, n_angles, &mut values, x, y, v, a);
            }
        }
    }
    Sinogram {
        angles: angles.to_vec(),
        offset_min: proj.offset_min,
        n_offsets: proj.n_offsets,
        values,
    }
}

/// Radon transform of a gray image.
pub fn radon_transform(img: &GrayImage, angles: &[f64]) -> Result<Sinogram> {
    validate_angles(angles)?;
    Ok(radon_raw(
        |r, c| img.get(r, c) as f64,
        img.width(),
        img.height(),
        angles,
    ))
}

/// Radon transform of a binary image over the same floating-point path as
/// gray (bits as 0.0/1.0).
pub fn radon_binary(img: &BinaryImage, angles: &[f64]) -> Result<Sinogram> {
    validate_angles(angles)?;
    Ok(radon_raw(
        |r, c| img.get(r, c) as f64,
        img.width(),
        img.height(),
        angles,
    ))
}

/// Bit-packed fast path: rows are packed into 64-bit words and only set bits
/// are projected. Output is identical to [`radon_binary`] up to interpolation
/// tolerance.
pub fn radon_binary_packed(img: &BinaryImage, angles: &[f64]) -> Result<Sinogram> {
    validate_angles(angles)?;
    let (width, height) = (img.width(), img.height());
    let words_per_row = width.div_ceil(64);
    let mut packed = vec![0u64; words_per_row * height];
    for r in 0..height {
        for c in 0..width {
            if img.get(r, c) == 1 {
                packed[r * words_per_row + c / 64] |= 1 << (c % 64);
            }
        }
    }

    let proj = Projection::new(width, height, angles);
    let n_angles = angles.len();
    let mut values = vec![0.0; proj.n_offsets * n_angles];
    let cx = (width as f64 - 1.0) / 2.0;
    let cy = (height as f64 - 1.0) / 2.0;
    for r in 0..height {
        let y = r as f64 - cy;
        for (wi, &word) in packed[r * words_per_row..(r + 1) * words_per_row]
            .iter()
            .enumerate()
        {
            let mut bits = word;
            while bits != 0 {
                let c = wi * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let x = c as f64 - cx;
                for a in 0..n_angles {
                    scatter(&proj, n_angles, &mut values, x, y, 1.0, a);
                }
            }
        }
    }
    Ok(Sinogram {
        angles: angles.to_vec(),
        offset_min: proj.offset_min,
        n_offsets: proj.n_offsets,
        values,
    })
}

/// Per-channel transforms of a color image, R/G/B order.
pub fn radon_rgb(img: &RgbImage, angles: &[f64]) -> Result<[Sinogram; 3]> {
    validate_angles(angles)?;
    let make = |ch: usize| {
        radon_raw(
            |r, c| img.get(r, c)[ch] as f64,
            img.width(),
            img.height(),
            angles,
        )
    };
    Ok([make(0), make(1), make(2)])
}

/// A workload for [`time_radon`].
#[derive(Debug, Clone, Copy)]
pub enum RadonInput<'a> {
    Rgb(&'a RgbImage),
    Gray(&'a GrayImage),
    /// Binary over the floating-point path.
    Binary(&'a BinaryImage),
    /// Binary over the bit-packed fast path.
    BinaryPacked(&'a BinaryImage),
}

impl RadonInput<'_> {
    pub fn kind(&self) -> &'static str {
        match self {
            RadonInput::Rgb(_) => "rgb",
            RadonInput::Gray(_) => "gray",
            RadonInput::Binary(_) => "binary",
            RadonInput::BinaryPacked(_) => "binary_packed",
        }
    }

    pub fn pixel_count(&self) -> usize {
        match self {
            RadonInput::Rgb(i) => i.width() * i.height(),
            RadonInput::Gray(i) => i.width() * i.height(),
            RadonInput::Binary(i) | RadonInput::BinaryPacked(i) => i.width() * i.height(),
        }
    }

    fn run(&self, angles: &[f64]) -> Result<()> {
        match self {
            RadonInput::Rgb(i) => {
                radon_rgb(i, angles)?;
            }
            RadonInput::Gray(i) => {
                radon_transform(i, angles)?;
            }
            RadonInput::Binary(i) => {
                radon_binary(i, angles)?;
            }
            RadonInput::BinaryPacked(i) => {
                radon_binary_packed(i, angles)?;
            }
        }
        Ok(())
    }
}

/// Wall-clock statistics over repeated runs.
#[derive(Debug, Clone)]
pub struct TimingStats {
    pub median: Duration,
    pub min: Duration,
    pub runs: Vec<Duration>,
}

impl TimingStats {
    fn from_runs(mut runs: Vec<Duration>) -> Self {
        let min = *runs.iter().min().expect("at least one run");
        let mut sorted = runs.clone();
        sorted.sort();
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) / 2
        };
        runs.shrink_to_fit();
        Self { median, min, runs }
    }
}

/// Time repeated transforms of one input: 2 untimed warmup runs, then
/// `repeats` timed runs, single-threaded.
pub fn time_radon(input: RadonInput<'_>, angles: &[f64], repeats: usize) -> Result<TimingStats> {
    if repeats == 0 {
        return Err(Error::Parameter("repeats must be at least 1".into()));
    }
    validate_angles(angles)?;
    for _ in 0..2 {
        input.run(angles)?;
    }
    let mut runs = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        input.run(angles)?;
        runs.push(start.elapsed());
    }
    Ok(TimingStats::from_runs(runs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Convention;

    fn total_mass(img: &GrayImage) -> f64 {
        img.pixels().iter().map(|&p| p as f64).sum()
    }

    #[test]
    fn empty_angle_list_is_error() {
        let img = GrayImage::filled(4, 4, 1).unwrap();
        assert!(matches!(
            radon_transform(&img, &[]),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            radon_transform(&img, &[180.0]),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            radon_transform(&img, &[-1.0]),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn zero_image_gives_zero_sinogram() {
        let img = GrayImage::filled(5, 7, 0).unwrap();
        let s = radon_transform(&img, &angle_range(30.0)).unwrap();
        assert!(s.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_pixel_columns_sum_to_one() {
        let mut img = GrayImage::filled(9, 9, 0).unwrap();
        img.set(2, 6, 1);
        let angles = angle_range(15.0);
        let s = radon_transform(&img, &angles).unwrap();
        for a in 0..angles.len() {
            assert!((s.column_sum(a) - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn mass_conservation_on_fixed_image() {
        let pixels: Vec<u8> = (0..64u32 * 48).map(|i| (i * 37 % 256) as u8).collect();
        let img = GrayImage::new(64, 48, pixels).unwrap();
        let mass = total_mass(&img);
        let angles = [0.0, 45.0, 90.0, 135.0];
        let s = radon_transform(&img, &angles).unwrap();
        for a in 0..angles.len() {
            let rel = (s.column_sum(a) - mass).abs() / mass;
            assert!(rel <= 1e-6, "angle {} relative error {rel}", angles[a]);
        }
    }

    #[test]
    fn zero_degrees_is_column_sums_for_odd_width() {
        let pixels: Vec<u8> = (0..7u32 * 5).map(|i| (i * 11 % 251) as u8).collect();
        let img = GrayImage::new(7, 5, pixels).unwrap();
        let s = radon_transform(&img, &[0.0]).unwrap();
        let col_sums: Vec<f64> = (0..7)
            .map(|c| (0..5).map(|r| img.get(r, c) as f64).sum())
            .collect();
        // offset of column c is c - 3 for width 7
        for (c, &expected) in col_sums.iter().enumerate() {
            let bin = (c as i32 - 3 - s.offset_min()) as usize;
            assert!(
                (s.value(bin, 0) - expected).abs() <= 1e-9,
                "column {c}: {} vs {expected}",
                s.value(bin, 0)
            );
        }
    }

    #[test]
    fn offset_axis_covers_diagonal() {
        let img = GrayImage::filled(610, 410, 1).unwrap();
        let s = radon_transform(&img, &[0.0]).unwrap();
        let diagonal = (610.0f64.hypot(410.0)).ceil() as usize;
        assert!(s.n_offsets() >= diagonal);
    }

    #[test]
    fn packed_path_matches_float_path() {
        let mut img = BinaryImage::filled(130, 40, 0, Convention::Ink1).unwrap();
        for r in 0..40 {
            for c in 0..130 {
                if (r * 31 + c * 7) % 5 == 0 {
                    img.set(r, c, 1);
                }
            }
        }
        let angles = angle_range(20.0);
        let float = radon_binary(&img, &angles).unwrap();
        let packed = radon_binary_packed(&img, &angles).unwrap();
        assert_eq!(float.n_offsets(), packed.n_offsets());
        for (a, b) in float.values().iter().zip(packed.values()) {
            assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn rgb_channels_are_independent_transforms() {
        let mut img = RgbImage::filled(12, 9, [0, 0, 0]).unwrap();
        for r in 0..9 {
            for c in 0..12 {
                img.set(r, c, [(r * c) as u8, (r + c) as u8, (r * 3) as u8]);
            }
        }
        let angles = [0.0, 60.0, 120.0];
        let [s0, _, _] = radon_rgb(&img, &angles).unwrap();
        let red = radon_transform(&img.channel(0), &angles).unwrap();
        for (a, b) in s0.values().iter().zip(red.values()) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn gray_rgb_image_has_identical_channel_sinograms() {
        let mut img = RgbImage::filled(10, 10, [0, 0, 0]).unwrap();
        for r in 0..10 {
            for c in 0..10 {
                let v = (r * 20 + c) as u8;
                img.set(r, c, [v, v, v]);
            }
        }
        let [s0, s1, s2] = radon_rgb(&img, &[0.0, 90.0]).unwrap();
        assert_eq!(s0.values(), s1.values());
        assert_eq!(s1.values(), s2.values());
    }

    #[test]
    fn timing_median_within_run_range() {
        let img = GrayImage::filled(32, 32, 50).unwrap();
        let stats = time_radon(RadonInput::Gray(&img), &angle_range(45.0), 11).unwrap();
        assert_eq!(stats.runs.len(), 11);
        let max = *stats.runs.iter().max().unwrap();
        assert!(stats.min <= stats.median && stats.median <= max);
        assert!(time_radon(RadonInput::Gray(&img), &angle_range(45.0), 0).is_err());
    }
}
