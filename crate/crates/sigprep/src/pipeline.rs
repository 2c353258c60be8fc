//! Stage orchestration: the full preprocessing sequence from color input to
//! cropped region of interest, plus the batch corpus runner.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::edges::{self, CannyParams, GradientOperator, DEFAULT_CANNY_SIGMA};
use crate::error::{Error, Result};
use crate::generate::{generate_signature, CANVAS_HEIGHT, CANVAS_WIDTH};
use crate::image::{invert, resize_bilinear, rgb_to_gray, BinaryImage, GrayImage, RgbImage};
use crate::morph;
use crate::netpbm::{self, AnyImage};
use crate::roi;
use crate::threshold::{binarize, histogram, otsu_threshold, ThresholdResult};

/// Which edge detector the pipeline runs, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOperator {
    Canny,
    Sobel,
    Prewitt,
    Roberts,
    None,
}

impl EdgeOperator {
    pub fn name(self) -> &'static str {
        match self {
            EdgeOperator::Canny => "canny",
            EdgeOperator::Sobel => "sobel",
            EdgeOperator::Prewitt => "prewitt",
            EdgeOperator::Roberts => "roberts",
            EdgeOperator::None => "none",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "canny" => Ok(EdgeOperator::Canny),
            "sobel" => Ok(EdgeOperator::Sobel),
            "prewitt" => Ok(EdgeOperator::Prewitt),
            "roberts" => Ok(EdgeOperator::Roberts),
            "none" => Ok(EdgeOperator::None),
            _ => Err(Error::Parameter(format!(
                "unknown edge operator {s:?} (expected canny|sobel|prewitt|roberts|none)"
            ))),
        }
    }
}

/// Which stage output the crop rectangle is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CropStage {
    PostMorphology,
    PostEdges,
}

impl CropStage {
    pub fn name(self) -> &'static str {
        match self {
            CropStage::PostMorphology => "post_morphology",
            CropStage::PostEdges => "post_edges",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "post_morphology" => Ok(CropStage::PostMorphology),
            "post_edges" => Ok(CropStage::PostEdges),
            _ => Err(Error::Parameter(format!(
                "unknown crop stage {s:?} (expected post_morphology|post_edges)"
            ))),
        }
    }
}

/// Canny configuration: fixed thresholds, or per-image Otsu seeding when
/// `thresholds` is `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CannyConfig {
    pub sigma: f64,
    pub thresholds: Option<(f64, f64)>,
}

impl Default for CannyConfig {
    fn default() -> Self {
        Self {
            sigma: DEFAULT_CANNY_SIGMA,
            thresholds: None,
        }
    }
}

/// Pipeline configuration. Defaults follow the reference processing chain:
/// normalize to 128x256, full morphology, canny edges, crop the
/// post-morphology image.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub target_rows: usize,
    pub target_cols: usize,
    pub edge_operator: EdgeOperator,
    pub canny: CannyConfig,
    pub crop_stage: CropStage,
    pub morphology_enabled: bool,
    /// Seed for corpus generation.
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            target_rows: 128,
            target_cols: 256,
            edge_operator: EdgeOperator::Canny,
            canny: CannyConfig::default(),
            crop_stage: CropStage::PostMorphology,
            morphology_enabled: true,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.target_rows < 8 || self.target_cols < 8 {
            return Err(Error::Parameter(format!(
                "target size must be at least 8x8, got {}x{}",
                self.target_rows, self.target_cols
            )));
        }
        if !(self.canny.sigma > 0.0) {
            return Err(Error::Parameter(format!(
                "canny sigma must be positive, got {}",
                self.canny.sigma
            )));
        }
        if let Some((low, high)) = self.canny.thresholds {
            CannyParams::new(self.canny.sigma, low, high)?;
        }
        if self.crop_stage == CropStage::PostEdges && self.edge_operator == EdgeOperator::None {
            return Err(Error::Parameter(
                "crop stage post_edges requires an edge operator".into(),
            ));
        }
        Ok(())
    }
}

/// One executed stage: name, output raster, wall time.
#[derive(Debug, Clone)]
pub struct StageRecord {
    pub name: &'static str,
    pub image: StageImage,
    pub duration: Duration,
}

#[derive(Debug, Clone)]
pub enum StageImage {
    Gray(GrayImage),
    Binary(BinaryImage),
}

impl StageImage {
    pub fn to_any(&self) -> AnyImage {
        match self {
            StageImage::Gray(i) => AnyImage::Gray(i.clone()),
            StageImage::Binary(i) => AnyImage::Binary(i.clone()),
        }
    }
}

/// Terminal pipeline status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceStatus {
    Ok,
    /// No foreground pixel survived binarization; there is nothing to crop.
    BlankInput,
    Error(String),
}

/// Ordered record of every executed stage plus the terminal status.
#[derive(Debug, Clone)]
pub struct StageTrace {
    pub stages: Vec<StageRecord>,
    pub status: TraceStatus,
}

impl StageTrace {
    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.name == name)
    }

    pub fn total_duration(&self) -> Duration {
        self.stages.iter().map(|s| s.duration).sum()
    }
}

/// Result of one pipeline run: the cropped ROI (when the input was not
/// blank) and the full stage trace.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub roi: Option<BinaryImage>,
    pub threshold: Option<ThresholdResult>,
    pub trace: StageTrace,
}

fn record<T>(
    stages: &mut Vec<StageRecord>,
    name: &'static str,
    wrap: impl Fn(&T) -> StageImage,
    op: impl FnOnce() -> Result<T>,
) -> Result<T> {
    let start = Instant::now();
    let out = op()?;
    stages.push(StageRecord {
        name,
        image: wrap(&out),
        duration: start.elapsed(),
    });
    Ok(out)
}

/// Run the full preprocessing sequence on one color image:
/// gray -> resize -> binarize -> invert to ink=1 -> (bridge -> remove ->
/// skeletonize) -> (edge detection) -> crop at the configured stage.
///
/// Stage errors and blank inputs are reported in the trace status; `Err` is
/// returned only for an invalid configuration.
pub fn run_pipeline(img: &RgbImage, cfg: &PipelineConfig) -> Result<PipelineRun> {
    cfg.validate()?;
    let mut stages = Vec::new();
    let mut threshold = None;
    let status = match run_stages(img, cfg, &mut stages, &mut threshold) {
        Ok(Some(())) => TraceStatus::Ok,
        Ok(None) => TraceStatus::BlankInput,
        Err(e) => TraceStatus::Error(e.to_string()),
    };
    let roi = match status {
        TraceStatus::Ok => stages.last().map(|s| match &s.image {
            StageImage::Binary(b) => b.clone(),
            StageImage::Gray(_) => unreachable!("crop stage output is binary"),
        }),
        _ => None,
    };
    Ok(PipelineRun {
        roi,
        threshold,
        trace: StageTrace { stages, status },
    })
}

fn run_stages(
    img: &RgbImage,
    cfg: &PipelineConfig,
    stages: &mut Vec<StageRecord>,
    threshold_out: &mut Option<ThresholdResult>,
) -> Result<Option<()>> {
    let gray = record(stages, "gray", |g: &GrayImage| StageImage::Gray(g.clone()), || {
        Ok(rgb_to_gray(img))
    })?;
    let resized = record(stages, "resize", |g: &GrayImage| StageImage::Gray(g.clone()), || {
        resize_bilinear(&gray, cfg.target_rows, cfg.target_cols)
    })?;
    let binary = record(
        stages,
        "binarize",
        |b: &BinaryImage| StageImage::Binary(b.clone()),
        || {
            let t = otsu_threshold(&histogram(&resized))?;
            *threshold_out = Some(t);
            Ok(binarize(&resized, &t))
        },
    )?;
    // a single-intensity scan has no object/background separation: blank
    if threshold_out.is_some_and(|t| t.degenerate) {
        return Ok(None);
    }
    let wrap_bin = |b: &BinaryImage| StageImage::Binary(b.clone());
    let ink = record(stages, "invert", wrap_bin, || Ok(invert(&binary)))?;

    let post_morph = if cfg.morphology_enabled {
        let bridged = record(stages, "bridge", wrap_bin, || morph::bridge(&ink))?;
        let removed = record(stages, "remove", wrap_bin, || morph::remove(&bridged))?;
        record(stages, "skeletonize", wrap_bin, || {
            morph::skeletonize(&removed)
        })?
    } else {
        ink
    };

    let post_edges = match cfg.edge_operator {
        EdgeOperator::None => None,
        EdgeOperator::Canny => Some(record(stages, "canny", wrap_bin, || {
            match cfg.canny.thresholds {
                Some((low, high)) => edges::canny(
                    &resized,
                    &CannyParams {
                        gaussian_sigma: cfg.canny.sigma,
                        low,
                        high,
                    },
                ),
                None => edges::canny_auto(&resized, cfg.canny.sigma),
            }
        })?),
        EdgeOperator::Sobel | EdgeOperator::Prewitt | EdgeOperator::Roberts => {
            let op = match cfg.edge_operator {
                EdgeOperator::Sobel => GradientOperator::Sobel,
                EdgeOperator::Prewitt => GradientOperator::Prewitt,
                _ => GradientOperator::Roberts,
            };
            let name = op.name();
            Some(record(stages, name, wrap_bin, || {
                let field = edges::gradient(&resized, op)?;
                let t = edges::otsu_edge_threshold(&field);
                Ok(edges::threshold_edges(&field, t))
            })?)
        }
    };

    let crop_source = match cfg.crop_stage {
        CropStage::PostMorphology => &post_morph,
        CropStage::PostEdges => post_edges
            .as_ref()
            .expect("validated: post_edges requires an edge operator"),
    };
    let bbox = match roi::foreground_bbox(crop_source) {
        Ok(b) => b,
        Err(Error::NoForeground) => return Ok(None),
        Err(e) => return Err(e),
    };
    record(stages, "crop", wrap_bin, || {
        roi::crop_binary(crop_source, &bbox)
    })?;
    Ok(Some(()))
}

/// Input source for a corpus run.
#[derive(Debug, Clone)]
pub enum CorpusSource {
    /// Read every netpbm file (`.pbm .pgm .ppm .p4m .p5m .p6m`) in a directory.
    Directory(PathBuf),
    /// Generate `count` seeded signatures at the standard canvas size.
    Generated { count: usize },
}

/// Outcome of one corpus item.
#[derive(Debug, Clone)]
pub enum ItemStatus {
    Ok,
    Blank,
    Error(String),
}

#[derive(Debug, Clone)]
pub struct CorpusItem {
    pub name: String,
    pub status: ItemStatus,
    pub roi: Option<BinaryImage>,
    pub stage_durations: Vec<(&'static str, Duration)>,
    pub total: Duration,
}

#[derive(Debug, Clone)]
pub struct CorpusReport {
    pub items: Vec<CorpusItem>,
    pub wall_time: Duration,
}

impl CorpusReport {
    pub fn error_count(&self) -> usize {
        self.items
            .iter()
            .filter(|i| matches!(i.status, ItemStatus::Error(_)))
            .count()
    }

    pub fn blank_count(&self) -> usize {
        self.items
            .iter()
            .filter(|i| matches!(i.status, ItemStatus::Blank))
            .count()
    }

    /// Total time per stage across all items, in executed order.
    pub fn aggregate_stage_durations(&self) -> Vec<(&'static str, Duration)> {
        let mut agg: Vec<(&'static str, Duration)> = Vec::new();
        for item in &self.items {
            for &(name, d) in &item.stage_durations {
                match agg.iter_mut().find(|(n, _)| *n == name) {
                    Some((_, total)) => *total += d,
                    None => agg.push((name, d)),
                }
            }
        }
        agg
    }
}

const NETPBM_EXTENSIONS: [&str; 6] = ["pbm", "pgm", "ppm", "p4m", "p5m", "p6m"];

fn is_netpbm_path(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| NETPBM_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

/// Promote any netpbm raster to RGB so the standard pipeline applies.
pub fn promote_to_rgb(img: &AnyImage) -> RgbImage {
    match img {
        AnyImage::Rgb(i) => i.clone(),
        AnyImage::Gray(g) => {
            let mut pixels = Vec::with_capacity(g.pixels().len() * 3);
            for &p in g.pixels() {
                pixels.extend_from_slice(&[p, p, p]);
            }
            RgbImage::new(g.width(), g.height(), pixels).expect("same dimensions")
        }
        AnyImage::Binary(b) => {
            let mut pixels = Vec::with_capacity(b.bits().len() * 3);
            for &bit in b.bits() {
                // ink=1 is black ink on white paper
                let v = if bit == 1 { 0 } else { 255 };
                pixels.extend_from_slice(&[v, v, v]);
            }
            RgbImage::new(b.width(), b.height(), pixels).expect("same dimensions")
        }
    }
}

/// Run the pipeline over a whole corpus. Per-item failures are isolated into
/// the report; `Err` is returned only when the source itself is unusable.
pub fn run_corpus(source: &CorpusSource, cfg: &PipelineConfig) -> Result<CorpusReport> {
    cfg.validate()?;
    let started = Instant::now();
    let mut items = Vec::new();

    let mut process = |name: String, image: Result<RgbImage>| {
        let item_start = Instant::now();
        let item = match image.and_then(|rgb| run_pipeline(&rgb, cfg)) {
            Ok(run) => {
                let stage_durations: Vec<_> = run
                    .trace
                    .stages
                    .iter()
                    .map(|s| (s.name, s.duration))
                    .collect();
                let status = match run.trace.status {
                    TraceStatus::Ok => ItemStatus::Ok,
                    TraceStatus::BlankInput => ItemStatus::Blank,
                    TraceStatus::Error(e) => ItemStatus::Error(e),
                };
                CorpusItem {
                    name,
                    status,
                    roi: run.roi,
                    stage_durations,
                    total: item_start.elapsed(),
                }
            }
            Err(e) => CorpusItem {
                name,
                status: ItemStatus::Error(e.to_string()),
                roi: None,
                stage_durations: Vec::new(),
                total: item_start.elapsed(),
            },
        };
        items.push(item);
    };

    match source {
        CorpusSource::Directory(dir) => {
            let entries = std::fs::read_dir(dir).map_err(|e| Error::Io {
                path: dir.display().to_string(),
                source: e,
            })?;
            let mut paths: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && is_netpbm_path(p))
                .collect();
            paths.sort();
            for path in paths {
                let name = path
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string());
                process(name, netpbm::read_image(&path).map(|i| promote_to_rgb(&i)));
            }
        }
        CorpusSource::Generated { count } => {
            for i in 0..*count {
                let seed = cfg.seed + i as u64;
                process(
                    format!("sig_{seed:04}"),
                    Ok(generate_signature(seed, CANVAS_WIDTH, CANVAS_HEIGHT)),
                );
            }
        }
    }

    Ok(CorpusReport {
        items,
        wall_time: started.elapsed(),
    })
}
