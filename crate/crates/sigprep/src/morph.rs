//! Binary morphological operators on ink=1 images: bridge, remove, and
//! Zhang-Suen skeletonization.
//!
//! All operators use parallel (single-snapshot) semantics: every output bit
//! is a function of the input raster only, never of partially updated output.
//! Out-of-bounds neighbors read as 0.

use std::sync::LazyLock;

use crate::error::Result;
use crate::image::{BinaryImage, Convention};

/// The 3x3 neighborhood of a pixel: 8 neighbor bits in clockwise order
/// starting north (N, NE, E, SE, S, SW, W, NW) plus the center bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighborhood3x3 {
    pub center: bool,
    pub neighbors: [bool; 8],
}

/// Row/col offsets matching the `neighbors` order.
pub const NEIGHBOR_OFFSETS: [(i32, i32); 8] = [
    (-1, 0),  // N
    (-1, 1),  // NE
    (0, 1),   // E
    (1, 1),   // SE
    (1, 0),   // S
    (1, -1),  // SW
    (0, -1),  // W
    (-1, -1), // NW
];

impl Neighborhood3x3 {
    /// Sample the neighborhood at `(row, col)`; out-of-bounds reads are 0.
    pub fn at(img: &BinaryImage, row: usize, col: usize) -> Self {
        let get = |dr: i32, dc: i32| -> bool {
            let r = row as i64 + dr as i64;
            let c = col as i64 + dc as i64;
            if r < 0 || c < 0 || r >= img.height() as i64 || c >= img.width() as i64 {
                false
            } else {
                img.get(r as usize, c as usize) == 1
            }
        };
        let mut neighbors = [false; 8];
        for (i, &(dr, dc)) in NEIGHBOR_OFFSETS.iter().enumerate() {
            neighbors[i] = get(dr, dc);
        }
        Self {
            center: get(0, 0),
            neighbors,
        }
    }

    /// Number of set neighbors (Zhang-Suen's B).
    pub fn set_count(&self) -> u32 {
        self.neighbors.iter().map(|&b| b as u32).sum()
    }

    /// Number of 0->1 transitions walking the ring clockwise (Zhang-Suen's A).
    pub fn transitions(&self) -> u32 {
        (0..8)
            .filter(|&i| !self.neighbors[i] && self.neighbors[(i + 1) % 8])
            .count() as u32
    }

    fn mask(&self) -> u8 {
        self.neighbors
            .iter()
            .enumerate()
            .fold(0u8, |m, (i, &b)| m | ((b as u8) << i))
    }
}

/// For each of the 256 neighbor configurations: the number of 8-connected
/// groups the set neighbors form within the ring, center excluded.
static NEIGHBOR_GROUPS: LazyLock<[u8; 256]> = LazyLock::new(|| {
    let mut table = [0u8; 256];
    for (mask, entry) in table.iter_mut().enumerate() {
        let mut seen = [false; 8];
        let mut groups = 0u8;
        for start in 0..8 {
            if mask & (1 << start) == 0 || seen[start] {
                continue;
            }
            groups += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(i) = stack.pop() {
                for j in 0..8 {
                    if seen[j] || mask & (1 << j) == 0 {
                        continue;
                    }
                    let (ri, ci) = NEIGHBOR_OFFSETS[i];
                    let (rj, cj) = NEIGHBOR_OFFSETS[j];
                    if (ri - rj).abs() <= 1 && (ci - cj).abs() <= 1 {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
        *entry = groups;
    }
    table
});

/// Connect discontinuities: a 0-pixel becomes 1 when its set neighbors fall
/// into two or more 8-connected groups of the ring (they are disconnected
/// without the center). Existing 1-bits are kept.
pub fn bridge(img: &BinaryImage) -> Result<BinaryImage> {
    img.require_convention(Convention::Ink1)?;
    let mut out = img.clone();
    for r in 0..img.height() {
        for c in 0..img.width() {
            if img.get(r, c) == 1 {
                continue;
            }
            let hood = Neighborhood3x3::at(img, r, c);
            if NEIGHBOR_GROUPS[hood.mask() as usize] >= 2 {
                out.set(r, c, 1);
            }
        }
    }
    Ok(out)
}

/// Delete interior pixels: a 1-pixel becomes 0 when all four 4-connected
/// neighbors are 1. Border pixels are never interior (out-of-bounds reads 0).
pub fn remove(img: &BinaryImage) -> Result<BinaryImage> {
    img.require_convention(Convention::Ink1)?;
    let (w, h) = (img.width(), img.height());
    let mut out = img.clone();
    for r in 1..h.saturating_sub(1) {
        for c in 1..w.saturating_sub(1) {
            if img.get(r, c) == 1
                && img.get(r - 1, c) == 1
                && img.get(r + 1, c) == 1
                && img.get(r, c - 1) == 1
                && img.get(r, c + 1) == 1
            {
                out.set(r, c, 0);
            }
        }
    }
    Ok(out)
}

/// Zhang-Suen thinning to fixpoint.
///
/// Each iteration runs two parallel subpasses; a pixel is deleted when its
/// neighbor count B is in [2, 6], its transition count A equals 1, and the
/// subpass's directional conditions hold. Stops when a full iteration deletes
/// nothing.
///
/// The textbook rules let a compact residue (a 2x2 block, for one) satisfy
/// the deletion conditions at every pixel simultaneously, erasing the whole
/// component. A subpass here never applies such a set as-is: the component's
/// first pixel in raster order is kept, so the 8-connected foreground
/// component count is invariant.
pub fn skeletonize(img: &BinaryImage) -> Result<BinaryImage> {
    img.require_convention(Convention::Ink1)?;
    let mut current = img.clone();
    loop {
        let mut deleted = false;
        for subpass in 0..2 {
            let snapshot = current.clone();
            let mut to_delete = Vec::new();
            for r in 0..snapshot.height() {
                for c in 0..snapshot.width() {
                    if snapshot.get(r, c) == 0 {
                        continue;
                    }
                    let hood = Neighborhood3x3::at(&snapshot, r, c);
                    let b = hood.set_count();
                    if !(2..=6).contains(&b) || hood.transitions() != 1 {
                        continue;
                    }
                    let [n, _, e, _, s, _, w, _] = hood.neighbors;
                    let ok = if subpass == 0 {
                        !(n && e && s) && !(e && s && w)
                    } else {
                        !(n && e && w) && !(n && s && w)
                    };
                    if ok {
                        to_delete.push((r, c));
                    }
                }
            }
            spare_component_survivors(&snapshot, &mut to_delete);
            for &(r, c) in &to_delete {
                current.set(r, c, 0);
            }
            deleted |= !to_delete.is_empty();
        }
        if !deleted {
            return Ok(current);
        }
    }
}

/// Remove from `to_delete` the first pixel of every 8-connected component
/// that the set would otherwise erase completely.
fn spare_component_survivors(snapshot: &BinaryImage, to_delete: &mut Vec<(usize, usize)>) {
    if to_delete.is_empty() {
        return;
    }
    let (w, h) = (snapshot.width(), snapshot.height());
    let mut labels = vec![0u32; w * h];
    let mut sizes = vec![0usize]; // index 0 unused (background)
    let mut next = 0u32;
    let mut stack = Vec::new();
    for start in 0..w * h {
        if snapshot.bits()[start] == 0 || labels[start] != 0 {
            continue;
        }
        next += 1;
        sizes.push(0);
        labels[start] = next;
        stack.push(start);
        while let Some(i) = stack.pop() {
            sizes[next as usize] += 1;
            let (r, c) = (i / w, i % w);
            for &(dr, dc) in &NEIGHBOR_OFFSETS {
                let (nr, nc) = (r as i64 + dr as i64, c as i64 + dc as i64);
                if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                    continue;
                }
                let n = (nr as usize) * w + nc as usize;
                if snapshot.bits()[n] == 1 && labels[n] == 0 {
                    labels[n] = next;
                    stack.push(n);
                }
            }
        }
    }

    let mut candidates_per_label = vec![0usize; sizes.len()];
    for &(r, c) in to_delete.iter() {
        candidates_per_label[labels[r * w + c] as usize] += 1;
    }
    let mut spared = vec![false; sizes.len()];
    to_delete.retain(|&(r, c)| {
        let label = labels[r * w + c] as usize;
        if candidates_per_label[label] == sizes[label] && !spared[label] {
            spared[label] = true;
            false
        } else {
            true
        }
    });
}
