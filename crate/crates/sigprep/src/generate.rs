//! Deterministic synthetic signature generator: smooth dark strokes on a
//! noisy near-white background, standing in for a pen-tablet corpus.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::image::RgbImage;

/// Default canvas, matching the acquisition geometry the pipeline targets.
pub const CANVAS_WIDTH: usize = 610;
pub const CANVAS_HEIGHT: usize = 410;

/// Generate one signature image, bit-identical for a given `(seed, size)`.
///
/// The canvas is near-white noise (intensities 240-255); 2-5 strokes of
/// quadratic curve chains, 2-4 px wide, in dark ink (0-60) are stamped on
/// top. All ink stays inside the central 50% of each dimension.
pub fn generate_signature(seed: u64, width: usize, height: usize) -> RgbImage {
    assert!(width >= 8 && height >= 8, "canvas too small for strokes");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut img = RgbImage::filled(width, height, [255, 255, 255]).expect("valid canvas");
    for r in 0..height {
        for c in 0..width {
            let shade: u8 = rng.random_range(240..=255);
            img.set(r, c, [shade, shade, shade]);
        }
    }

    let stroke_count = rng.random_range(2..=5usize);
    for _ in 0..stroke_count {
        let ink: u8 = rng.random_range(0..=60);
        let stroke_width = rng.random_range(2..=4usize);
        let radius = stroke_width as f64 / 2.0;
        draw_stroke(&mut img, &mut rng, ink, radius);
    }
    img
}

/// Central-50% region inset so that stamped disks cannot escape it.
fn control_point_box(width: usize, height: usize, radius: f64) -> (f64, f64, f64, f64) {
    let inset = radius.ceil() + 1.0;
    let min_x = width as f64 / 4.0 + inset;
    let max_x = 3.0 * width as f64 / 4.0 - 1.0 - inset;
    let min_y = height as f64 / 4.0 + inset;
    let max_y = 3.0 * height as f64 / 4.0 - 1.0 - inset;
    (min_x, max_x, min_y, max_y)
}

fn draw_stroke(img: &mut RgbImage, rng: &mut ChaCha8Rng, ink: u8, radius: f64) {
    let (min_x, max_x, min_y, max_y) = control_point_box(img.width(), img.height(), radius);
    let point = |rng: &mut ChaCha8Rng| -> (f64, f64) {
        (
            rng.random_range(min_x..=max_x),
            rng.random_range(min_y..=max_y),
        )
    };

    let segments = rng.random_range(2..=4usize);
    let mut start = point(rng);
    let mut control = point(rng);
    for _ in 0..segments {
        let end = point(rng);
        stamp_quadratic(img, start, control, end, radius, ink);
        // mirror the control point for a smooth join, clamped into the box
        control = (
            (2.0 * end.0 - control.0).clamp(min_x, max_x),
            (2.0 * end.1 - control.1).clamp(min_y, max_y),
        );
        start = end;
    }
}

fn stamp_quadratic(
    img: &mut RgbImage,
    p0: (f64, f64),
    p1: (f64, f64),
    p2: (f64, f64),
    radius: f64,
    ink: u8,
) {
    let approx_len = dist(p0, p1) + dist(p1, p2);
    let steps = (2.0 * approx_len).ceil().max(8.0) as usize;
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let u = 1.0 - t;
        let x = u * u * p0.0 + 2.0 * u * t * p1.0 + t * t * p2.0;
        let y = u * u * p0.1 + 2.0 * u * t * p1.1 + t * t * p2.1;
        stamp_disk(img, x, y, radius, ink);
    }
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn stamp_disk(img: &mut RgbImage, x: f64, y: f64, radius: f64, ink: u8) {
    let r_int = radius.ceil() as i64;
    let (cx, cy) = (x.round() as i64, y.round() as i64);
    for dy in -r_int..=r_int {
        for dx in -r_int..=r_int {
            if (dx * dx + dy * dy) as f64 > radius * radius {
                continue;
            }
            let (px, py) = (cx + dx, cy + dy);
            if px < 0 || py < 0 || px >= img.width() as i64 || py >= img.height() as i64 {
                continue;
            }
            img.set(py as usize, px as usize, [ink, ink, ink]);
        }
    }
}
