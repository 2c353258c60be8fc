//! Gray-level histogram, Otsu optimal threshold selection, and binarization.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::image::{BinaryImage, Convention, GrayImage};

/// Intensity histogram with one bin per 8-bit level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram256 {
    counts: [u64; 256],
}

impl Histogram256 {
    pub fn from_counts(counts: [u64; 256]) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Count pixels per intensity level.
pub fn histogram(img: &GrayImage) -> Histogram256 {
    let mut counts = [0u64; 256];
    for &p in img.pixels() {
        counts[p as usize] += 1;
    }
    Histogram256 { counts }
}

/// Selected global threshold.
///
/// `normalized` is `level / 255`, the `[0, 1]` form the method is usually
/// quoted in. `degenerate` is set when the histogram had a single occupied
/// bin and no class separation exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult {
    pub level: u8,
    pub normalized: f64,
    pub degenerate: bool,
}

impl ThresholdResult {
    pub fn at_level(level: u8) -> Self {
        Self {
            level,
            normalized: level as f64 / 255.0,
            degenerate: false,
        }
    }
}

/// Compare two between-class variance fractions `a^2/b` exactly.
fn variance_cmp(lhs: (i128, u128), rhs: (i128, u128)) -> std::cmp::Ordering {
    let num_l = BigUint::from(lhs.0.unsigned_abs());
    let num_r = BigUint::from(rhs.0.unsigned_abs());
    (&num_l * &num_l * BigUint::from(rhs.1)).cmp(&(&num_r * &num_r * BigUint::from(lhs.1)))
}

/// Otsu's method: the threshold level maximizing between-class variance
/// (equivalently minimizing the weighted within-class variance).
///
/// Candidates are `t in [0, 254]`; the comparison is carried out in exact
/// integer arithmetic so ties are detected exactly. Ties are broken by
/// returning the rounded mean of all maximizing levels.
pub fn otsu_threshold(h: &Histogram256) -> Result<ThresholdResult> {
    let total = h.total();
    if total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let occupied: Vec<usize> = (0..256).filter(|&i| h.counts[i] > 0).collect();
    if occupied.len() == 1 {
        return Ok(ThresholdResult {
            level: occupied[0] as u8,
            normalized: occupied[0] as f64 / 255.0,
            degenerate: true,
        });
    }

    let total_sum: u64 = h
        .counts
        .iter()
        .enumerate()
        .map(|(level, &c)| level as u64 * c)
        .sum();

    // Exact running argmax; incremental prefix sums instead of re-summing.
    let mut w0 = 0u64;
    let mut s0 = 0u64;
    let mut best: Option<(i128, u128)> = None;
    let mut best_levels: Vec<u32> = Vec::new();
    for t in 0..255usize {
        w0 += h.counts[t];
        s0 += t as u64 * h.counts[t];
        let w1 = total - w0;
        if w0 == 0 || w1 == 0 {
            continue;
        }
        let s1 = total_sum - s0;
        let a = s0 as i128 * w1 as i128 - s1 as i128 * w0 as i128;
        let candidate = (a, w0 as u128 * w1 as u128);
        match best {
            None => {
                best = Some(candidate);
                best_levels.push(t as u32);
            }
            Some(b) => match variance_cmp(candidate, b) {
                std::cmp::Ordering::Greater => {
                    best = Some(candidate);
                    best_levels.clear();
                    best_levels.push(t as u32);
                }
                std::cmp::Ordering::Equal => best_levels.push(t as u32),
                std::cmp::Ordering::Less => {}
            },
        }
    }

    let mean = best_levels.iter().sum::<u32>() as f64 / best_levels.len() as f64;
    let level = mean.round() as u8;
    Ok(ThresholdResult::at_level(level))
}

/// Threshold a gray image: pixels strictly above `t.level` become 1.
///
/// The result is tagged `Background1`: white paper maps to 1, ink to 0.
pub fn binarize(img: &GrayImage, t: &ThresholdResult) -> BinaryImage {
    let bits = img
        .pixels()
        .iter()
        .map(|&p| u8::from(p > t.level))
        .collect();
    BinaryImage::new(img.width(), img.height(), bits, Convention::Background1)
        .expect("dimensions come from a valid image")
}

/// From-scratch evaluation of the variance fraction at `t`, used by tests to
/// cross-check the incremental path: `(s0*w1 - s1*w0)^2 / (w0*w1)` with class
/// 0 holding levels `<= t`. `None` when a class is empty.
#[cfg(test)]
pub(crate) fn split_variance(h: &Histogram256, t: usize) -> Option<(i128, u128)> {
    let mut w0 = 0u64;
    let mut s0 = 0u64;
    for (level, &c) in h.counts.iter().enumerate().take(t + 1) {
        w0 += c;
        s0 += level as u64 * c;
    }
    let w1 = h.total() - w0;
    if w0 == 0 || w1 == 0 {
        return None;
    }
    let total_sum: u64 = h
        .counts
        .iter()
        .enumerate()
        .map(|(level, &c)| level as u64 * c)
        .sum();
    let s1 = total_sum - s0;
    let a = s0 as i128 * w1 as i128 - s1 as i128 * w0 as i128;
    Some((a, w0 as u128 * w1 as u128))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(pairs: &[(usize, u64)]) -> Histogram256 {
        let mut counts = [0u64; 256];
        for &(level, c) in pairs {
            counts[level] = c;
        }
        Histogram256::from_counts(counts)
    }

    #[test]
    fn histogram_counts_pixels() {
        let img = GrayImage::filled(2, 2, 0).unwrap();
        let h = histogram(&img);
        assert_eq!(h.counts()[0], 4);
        assert_eq!(h.total(), 4);

        let img = GrayImage::new(2, 2, vec![0, 0, 255, 255]).unwrap();
        let h = histogram(&img);
        assert_eq!(h.counts()[0], 2);
        assert_eq!(h.counts()[255], 2);
    }

    #[test]
    fn two_spike_flat_objective_ties_to_mean() {
        // equal mass at 0 and 255: variance is constant over t in [0,254],
        // so the tie-break returns the mean, 127.
        let h = hist(&[(0, 2048), (255, 2048)]);
        let t = otsu_threshold(&h).unwrap();
        assert_eq!(t.level, 127);
        assert!(!t.degenerate);
        assert_eq!(t.normalized, 127.0 / 255.0);
    }

    #[test]
    fn single_occupied_bin_is_degenerate() {
        let h = hist(&[(7, 100)]);
        let t = otsu_threshold(&h).unwrap();
        assert_eq!(t.level, 7);
        assert!(t.degenerate);
    }

    #[test]
    fn empty_histogram_is_error() {
        let h = hist(&[]);
        assert!(matches!(otsu_threshold(&h), Err(Error::EmptyHistogram)));
    }

    #[test]
    fn two_spike_level_lies_between_spikes() {
        let h = hist(&[(40, 100), (200, 300)]);
        let t = otsu_threshold(&h).unwrap();
        assert!((40..200).contains(&(t.level as usize)));
    }

    #[test]
    fn incremental_matches_from_scratch_split() {
        let h = hist(&[(3, 17), (90, 5), (200, 41), (255, 9)]);
        let total = h.total();
        let total_sum: u64 = h
            .counts()
            .iter()
            .enumerate()
            .map(|(l, &c)| l as u64 * c)
            .sum();
        let mut w0 = 0u64;
        let mut s0 = 0u64;
        for t in 0..255usize {
            w0 += h.counts()[t];
            s0 += t as u64 * h.counts()[t];
            let w1 = total - w0;
            let inc = if w0 == 0 || w1 == 0 {
                None
            } else {
                let s1 = total_sum - s0;
                Some((
                    s0 as i128 * w1 as i128 - s1 as i128 * w0 as i128,
                    w0 as u128 * w1 as u128,
                ))
            };
            assert_eq!(inc, split_variance(&h, t));
        }
    }

    #[test]
    fn binarize_is_strictly_greater_and_background_one() {
        let img = GrayImage::new(2, 1, vec![100, 150]).unwrap();
        let out = binarize(&img, &ThresholdResult::at_level(127));
        assert_eq!(out.bits(), &[0, 1]);
        assert_eq!(out.convention(), Convention::Background1);

        // pixels exactly at the level fall on the object side
        let img = GrayImage::new(1, 1, vec![127]).unwrap();
        assert_eq!(binarize(&img, &ThresholdResult::at_level(127)).bits(), &[0]);
    }

    #[test]
    fn binarize_fig2_bright_patch_is_all_ones() {
        let img = GrayImage::new(3, 9, vec![240, 253, 255, 255, 255, 255, 249, 252, 252,
                                            250, 255, 253, 255, 254, 253, 249, 250, 252,
                                            255, 252, 254, 255, 253, 254, 249, 253, 254]).unwrap();
        let out = binarize(&img, &ThresholdResult::at_level(127));
        assert!(out.bits().iter().all(|&b| b == 1));
    }

    #[test]
    fn binarize_all_zero_image() {
        let img = GrayImage::filled(4, 4, 0).unwrap();
        assert_eq!(binarize(&img, &ThresholdResult::at_level(0)).count_ones(), 0);
    }
}
