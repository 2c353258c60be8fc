//! Radon-transform timing harness: compares transform cost across image
//! kinds (color, gray, binary) and between original and auto-cropped
//! signatures.

use std::time::Duration;

use crate::error::Result;
use crate::generate::{generate_signature, CANVAS_HEIGHT, CANVAS_WIDTH};
use crate::image::{invert, rgb_to_gray, BinaryImage};
use crate::radon::{angle_range, time_radon, RadonInput, TimingStats};
use crate::roi::auto_crop;
use crate::threshold::{binarize, histogram, otsu_threshold};

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub seed: u64,
    /// Number of signatures in the original-vs-cropped comparison.
    pub count: usize,
    pub repeats: usize,
    pub angles: Vec<f64>,
    pub width: usize,
    pub height: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            count: 5,
            repeats: 11,
            angles: angle_range(1.0),
            width: CANVAS_WIDTH,
            height: CANVAS_HEIGHT,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub kind: String,
    pub pixels: usize,
    pub repeats: usize,
    pub median: Duration,
    pub min: Duration,
}

impl BenchRow {
    fn new(kind: impl Into<String>, pixels: usize, repeats: usize, stats: &TimingStats) -> Self {
        Self {
            kind: kind.into(),
            pixels,
            repeats,
            median: stats.median,
            min: stats.min,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub angle_count: usize,
    pub repeats: usize,
}

impl BenchReport {
    pub fn row(&self, kind: &str) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.kind == kind)
    }

    /// Rows of one kind in emission order (original/cropped repeat per image).
    pub fn rows_of(&self, kind: &str) -> Vec<&BenchRow> {
        self.rows.iter().filter(|r| r.kind == kind).collect()
    }

    /// Tab-separated report: `kind pixels repeats median_ms min_ms`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str("# radon transform timing\n");
        out.push_str(&format!(
            "# {} angles, median of {} runs after 2 warmup runs, single-threaded\n",
            self.angle_count, self.repeats
        ));
        out.push_str("kind\tpixels\trepeats\tmedian_ms\tmin_ms\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{}\t{}\t{}\t{:.3}\t{:.3}\n",
                r.kind,
                r.pixels,
                r.repeats,
                r.median.as_secs_f64() * 1e3,
                r.min.as_secs_f64() * 1e3,
            ));
        }
        out
    }
}

/// Binarized ink=1 version of a generated signature at full canvas size.
fn binarized_ink(seed: u64, width: usize, height: usize) -> Result<BinaryImage> {
    let rgb = generate_signature(seed, width, height);
    let gray = rgb_to_gray(&rgb);
    let t = otsu_threshold(&histogram(&gray))?;
    Ok(invert(&binarize(&gray, &t)))
}

/// Run the benchmark: one row per image kind (rgb, gray, binary on the float
/// path, binary on the bit-packed path) plus an original/cropped row pair per
/// sampled signature.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    let mut rows = Vec::new();

    let rgb = generate_signature(cfg.seed, cfg.width, cfg.height);
    let gray = rgb_to_gray(&rgb);
    let t = otsu_threshold(&histogram(&gray))?;
    let binary = invert(&binarize(&gray, &t));
    let pixels = cfg.width * cfg.height;

    for input in [
        RadonInput::Rgb(&rgb),
        RadonInput::Gray(&gray),
        RadonInput::Binary(&binary),
        RadonInput::BinaryPacked(&binary),
    ] {
        let stats = time_radon(input, &cfg.angles, cfg.repeats)?;
        rows.push(BenchRow::new(input.kind(), pixels, cfg.repeats, &stats));
    }

    for i in 0..cfg.count {
        let ink = binarized_ink(cfg.seed + i as u64, cfg.width, cfg.height)?;
        let cropped = auto_crop(&ink)?;
        let original_stats = time_radon(RadonInput::Binary(&ink), &cfg.angles, cfg.repeats)?;
        let cropped_stats = time_radon(RadonInput::Binary(&cropped), &cfg.angles, cfg.repeats)?;
        rows.push(BenchRow::new(
            "original",
            ink.width() * ink.height(),
            cfg.repeats,
            &original_stats,
        ));
        rows.push(BenchRow::new(
            "cropped",
            cropped.width() * cropped.height(),
            cfg.repeats,
            &cropped_stats,
        ));
    }

    Ok(BenchReport {
        rows,
        angle_count: cfg.angles.len(),
        repeats: cfg.repeats,
    })
}
