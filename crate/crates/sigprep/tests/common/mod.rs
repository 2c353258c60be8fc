//! Shared test oracles: flood-fill component counting, an exact-rational
//! Otsu reference independent of the library's incremental path, and seeded
//! random image helpers.

#![allow(dead_code)]

use num_rational::Ratio;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sigprep::{BinaryImage, Convention, GrayImage, Histogram256};

/// Count connected components of 1-bits under 8-connectivity by flood fill.
pub fn count_components_8(img: &BinaryImage) -> usize {
    let (w, h) = (img.width(), img.height());
    let mut seen = vec![false; w * h];
    let mut components = 0;
    let mut stack = Vec::new();
    for start in 0..w * h {
        if img.bits()[start] == 0 || seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (r, c) = (i / w, i % w);
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
                    if img.bits()[n] == 1 && !seen[n] {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
        }
    }
    components
}

/// Count connected components of 0-bits under 4-connectivity by flood fill.
pub fn count_background_components_4(img: &BinaryImage) -> usize {
    let (w, h) = (img.width(), img.height());
    let mut seen = vec![false; w * h];
    let mut components = 0;
    let mut stack = Vec::new();
    for start in 0..w * h {
        if img.bits()[start] == 1 || seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (r, c) = (i / w, i % w);
            for (dr, dc) in [(-1i64, 0i64), (1, 0), (0, -1), (0, 1)] {
                let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                    continue;
                }
                let n = (nr as usize) * w + nc as usize;
                if img.bits()[n] == 0 && !seen[n] {
                    seen[n] = true;
                    stack.push(n);
                }
            }
        }
    }
    components
}

/// `a` is a subset of `b` on 1-bits.
pub fn is_subset(a: &BinaryImage, b: &BinaryImage) -> bool {
    a.bits().iter().zip(b.bits()).all(|(&x, &y)| x <= y)
}

/// Exhaustive-search Otsu reference computed from the definition with exact
/// rational arithmetic: for every candidate t in [0, 254] evaluate
/// `w0 * w1 * (mu0 - mu1)^2` via class means, take the argmax set, and break
/// ties with the rounded mean of the maximizing levels.
///
/// Panics on empty histograms; single-bin histograms return that bin.
pub fn otsu_reference_level(h: &Histogram256) -> u8 {
    let counts = h.counts();
    let occupied: Vec<usize> = (0..256).filter(|&i| counts[i] > 0).collect();
    assert!(!occupied.is_empty(), "oracle needs a nonempty histogram");
    if occupied.len() == 1 {
        return occupied[0] as u8;
    }

    let mut best: Option<Ratio<i128>> = None;
    let mut argmax: Vec<u32> = Vec::new();
    for t in 0..255usize {
        let mut w0: i128 = 0;
        let mut sum0: i128 = 0;
        let mut w1: i128 = 0;
        let mut sum1: i128 = 0;
        for (level, &c) in counts.iter().enumerate() {
            if level <= t {
                w0 += c as i128;
                sum0 += (level as i128) * c as i128;
            } else {
                w1 += c as i128;
                sum1 += (level as i128) * c as i128;
            }
        }
        if w0 == 0 || w1 == 0 {
            continue;
        }
        let mu0 = Ratio::new(sum0, w0);
        let mu1 = Ratio::new(sum1, w1);
        let diff = mu0 - mu1;
        let variance = Ratio::from_integer(w0 * w1) * diff * diff;
        match &best {
            None => {
                best = Some(variance);
                argmax.push(t as u32);
            }
            Some(b) => {
                if variance > *b {
                    best = Some(variance);
                    argmax.clear();
                    argmax.push(t as u32);
                } else if variance == *b {
                    argmax.push(t as u32);
                }
            }
        }
    }
    let mean = argmax.iter().sum::<u32>() as f64 / argmax.len() as f64;
    mean.round() as u8
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_gray(rng: &mut ChaCha8Rng, width: usize, height: usize) -> GrayImage {
    let pixels = (0..width * height).map(|_| rng.random()).collect();
    GrayImage::new(width, height, pixels).unwrap()
}

/// Random ink=1 mask where each bit is 1 with probability `density`.
pub fn random_binary_ink(
    rng: &mut ChaCha8Rng,
    width: usize,
    height: usize,
    density: f64,
) -> BinaryImage {
    let bits = (0..width * height)
        .map(|_| u8::from(rng.random_bool(density)))
        .collect();
    BinaryImage::new(width, height, bits, Convention::Ink1).unwrap()
}
