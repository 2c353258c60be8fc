//! Command-line surface: single-image processing, corpus runs, the radon
//! timing benchmark, and the signature generator.
//!
//! Exit codes: 0 success (blank inputs warn but succeed), 1 processing
//! error, 2 usage error. A flat `key=value` config file can preset any flag;
//! explicit flags win over config values, which win over defaults.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::bench::{run_bench, BenchConfig};
use crate::generate::{generate_signature, CANVAS_HEIGHT, CANVAS_WIDTH};
use crate::netpbm::{self, AnyImage};
use crate::pipeline::{
    promote_to_rgb, run_corpus, run_pipeline, CannyConfig, CorpusReport, CorpusSource, CropStage,
    EdgeOperator, ItemStatus, PipelineConfig, StageImage, TraceStatus,
};
use crate::radon::angle_range;

#[derive(Parser, Debug)]
#[command(name = "sigprep", version, about = "Signature image preprocessing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Preprocess a single image and write its cropped region of interest
    Process(FlagSet),
    /// Preprocess every image in a directory, or a generated corpus
    Corpus(FlagSet),
    /// Radon-transform timing report across image kinds
    Bench(FlagSet),
    /// Write seeded synthetic signature images
    Generate(FlagSet),
}

/// One flag set shared by all subcommands; which entries matter depends on
/// the subcommand. Everything is optional here so that config-file values
/// can fill the gaps.
#[derive(Args, Debug, Default, Clone)]
struct FlagSet {
    /// Input image (process) or input directory (corpus)
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Flat key=value config file
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Normalization target as RxC, e.g. 128x256
    #[arg(long, value_name = "RxC")]
    size: Option<String>,
    /// Edge operator: canny|sobel|prewitt|roberts|none
    #[arg(long, value_name = "OP")]
    edge: Option<String>,
    /// Crop source stage: post_morphology|post_edges
    #[arg(long = "crop-stage", value_name = "NAME")]
    crop_stage: Option<String>,
    /// Skip bridge/remove/skeletonize
    #[arg(long = "no-morph")]
    no_morph: bool,
    /// Write every intermediate stage image
    #[arg(long = "emit-stages")]
    emit_stages: bool,
    /// Generator seed
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Image count (corpus generation, bench sample, generate)
    #[arg(long, value_name = "N")]
    count: Option<usize>,
    /// Timed repetitions per benchmark measurement
    #[arg(long, value_name = "N")]
    repeats: Option<usize>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Process(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    fn process(msg: impl std::fmt::Display) -> Self {
        CliError::Process(msg.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Fully resolved settings after defaults, config file, and flags.
#[derive(Debug, Clone)]
struct Settings {
    input: Option<PathBuf>,
    out: PathBuf,
    size: (usize, usize),
    edge: EdgeOperator,
    crop_stage: CropStage,
    no_morph: bool,
    emit_stages: bool,
    seed: u64,
    count: Option<usize>,
    repeats: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            input: None,
            out: PathBuf::from("."),
            size: (128, 256),
            edge: EdgeOperator::Canny,
            crop_stage: CropStage::PostMorphology,
            no_morph: false,
            emit_stages: false,
            seed: 0,
            count: None,
            repeats: 11,
        }
    }
}

impl Settings {
    fn pipeline_config(&self) -> PipelineConfig {
        PipelineConfig {
            target_rows: self.size.0,
            target_cols: self.size.1,
            edge_operator: self.edge,
            canny: CannyConfig::default(),
            crop_stage: self.crop_stage,
            morphology_enabled: !self.no_morph,
            seed: self.seed,
        }
    }
}

fn parse_size(value: &str) -> CliResult<(usize, usize)> {
    let err = || CliError::usage(format!("malformed --size {value:?}, expected RxC like 128x256"));
    let (rows, cols) = value.split_once('x').ok_or_else(err)?;
    let rows: usize = rows.trim().parse().map_err(|_| err())?;
    let cols: usize = cols.trim().parse().map_err(|_| err())?;
    if rows == 0 || cols == 0 {
        return Err(err());
    }
    Ok((rows, cols))
}

fn parse_bool(key: &str, value: &str) -> CliResult<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(CliError::usage(format!(
            "config key {key}: expected a boolean, got {value:?}"
        ))),
    }
}

/// Parse a flat `key=value` config file. `#` starts a comment; blank lines
/// are ignored. Keys are the flag names without the leading dashes.
fn parse_config_file(path: &Path) -> CliResult<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::process(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::usage(format!(
                "config {}:{}: expected key=value, got {raw:?}",
                path.display(),
                lineno + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn apply_config(settings: &mut Settings, config: HashMap<String, String>) -> CliResult<()> {
    for (key, value) in config {
        match key.as_str() {
            "in" => settings.input = Some(PathBuf::from(&value)),
            "out" => settings.out = PathBuf::from(&value),
            "size" => settings.size = parse_size(&value)?,
            "edge" => {
                settings.edge = EdgeOperator::parse(&value)
                    .map_err(|e| CliError::usage(e.to_string()))?;
            }
            "crop-stage" => {
                settings.crop_stage =
                    CropStage::parse(&value).map_err(|e| CliError::usage(e.to_string()))?;
            }
            "no-morph" => settings.no_morph = parse_bool(&key, &value)?,
            "emit-stages" => settings.emit_stages = parse_bool(&key, &value)?,
            "seed" => {
                settings.seed = value
                    .parse()
                    .map_err(|_| CliError::usage(format!("config key seed: bad integer {value:?}")))?;
            }
            "count" => {
                settings.count = Some(value.parse().map_err(|_| {
                    CliError::usage(format!("config key count: bad integer {value:?}"))
                })?);
            }
            "repeats" => {
                settings.repeats = value.parse().map_err(|_| {
                    CliError::usage(format!("config key repeats: bad integer {value:?}"))
                })?;
            }
            other => {
                return Err(CliError::usage(format!("unknown config key {other:?}")));
            }
        }
    }
    Ok(())
}

fn apply_flags(settings: &mut Settings, flags: &FlagSet) -> CliResult<()> {
    if let Some(input) = &flags.input {
        settings.input = Some(input.clone());
    }
    if let Some(out) = &flags.out {
        settings.out = out.clone();
    }
    if let Some(size) = &flags.size {
        settings.size = parse_size(size)?;
    }
    if let Some(edge) = &flags.edge {
        settings.edge = EdgeOperator::parse(edge).map_err(|e| CliError::usage(e.to_string()))?;
    }
    if let Some(stage) = &flags.crop_stage {
        settings.crop_stage =
            CropStage::parse(stage).map_err(|e| CliError::usage(e.to_string()))?;
    }
    if flags.no_morph {
        settings.no_morph = true;
    }
    if flags.emit_stages {
        settings.emit_stages = true;
    }
    if let Some(seed) = flags.seed {
        settings.seed = seed;
    }
    if let Some(count) = flags.count {
        settings.count = Some(count);
    }
    if let Some(repeats) = flags.repeats {
        settings.repeats = repeats;
    }
    Ok(())
}

fn resolve_settings(flags: &FlagSet) -> CliResult<Settings> {
    let mut settings = Settings::default();
    if let Some(path) = &flags.config {
        apply_config(&mut settings, parse_config_file(path)?)?;
    }
    apply_flags(&mut settings, flags)?;
    Ok(settings)
}

/// Parse arguments and execute; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };

    let outcome = match &cli.command {
        Command::Process(flags) => resolve_settings(flags).and_then(cmd_process),
        Command::Corpus(flags) => resolve_settings(flags).and_then(cmd_corpus),
        Command::Bench(flags) => resolve_settings(flags).and_then(cmd_bench),
        Command::Generate(flags) => resolve_settings(flags).and_then(cmd_generate),
    };

    match outcome {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run with --help for usage");
            2
        }
        Err(CliError::Process(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn ensure_out_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::process(format!("cannot create {}: {e}", dir.display())))
}

/// Refuse to write any output over an input file.
fn check_collisions(inputs: &[PathBuf], outputs: &[PathBuf]) -> CliResult<()> {
    let canonical_inputs: Vec<PathBuf> = inputs
        .iter()
        .filter_map(|p| p.canonicalize().ok())
        .collect();
    for out in outputs {
        // outputs do not exist yet; canonicalize the parent instead
        let resolved = match (out.parent(), out.file_name()) {
            (Some(parent), Some(name)) => parent
                .canonicalize()
                .map(|p| p.join(name))
                .unwrap_or_else(|_| out.clone()),
            _ => out.clone(),
        };
        if canonical_inputs.iter().any(|i| *i == resolved) {
            return Err(CliError::process(format!(
                "refusing to overwrite input {}",
                resolved.display()
            )));
        }
    }
    Ok(())
}

fn input_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into())
}

fn stage_file_name(stem: &str, index: usize, name: &str, image: &StageImage) -> String {
    let ext = match image {
        StageImage::Gray(_) => "p5m",
        StageImage::Binary(_) => "p4m",
    };
    format!("{stem}.{index}.{name}.{ext}")
}

fn write_any(img: &AnyImage, path: &Path) -> CliResult<()> {
    netpbm::write_image(img, path).map_err(CliError::process)
}

fn cmd_process(settings: Settings) -> CliResult<()> {
    let input = settings
        .input
        .clone()
        .ok_or_else(|| CliError::usage("process requires --in"))?;
    let cfg = settings.pipeline_config();
    cfg.validate().map_err(CliError::process)?;

    let image = netpbm::read_image(&input).map_err(CliError::process)?;
    let rgb = promote_to_rgb(&image);

    let run = run_pipeline(&rgb, &cfg).map_err(CliError::process)?;
    let stem = input_stem(&input);

    ensure_out_dir(&settings.out)?;
    let mut outputs = vec![settings.out.join(format!("{stem}.roi.p4m"))];
    if settings.emit_stages {
        for (i, stage) in run.trace.stages.iter().enumerate() {
            outputs.push(
                settings
                    .out
                    .join(stage_file_name(&stem, i + 1, stage.name, &stage.image)),
            );
        }
    }
    check_collisions(&[input.clone()], &outputs)?;

    if let Some(t) = &run.threshold {
        if t.degenerate {
            eprintln!(
                "warning: degenerate histogram in {}: single intensity level {}",
                input.display(),
                t.level
            );
        }
    }

    if settings.emit_stages {
        for (i, stage) in run.trace.stages.iter().enumerate() {
            let path = settings
                .out
                .join(stage_file_name(&stem, i + 1, stage.name, &stage.image));
            write_any(&stage.image.to_any(), &path)?;
        }
    }

    match &run.trace.status {
        TraceStatus::Ok => {
            let roi = run.roi.as_ref().expect("ok status implies roi");
            let roi_path = settings.out.join(format!("{stem}.roi.p4m"));
            netpbm::write_binary(roi, &roi_path).map_err(CliError::process)?;
            println!(
                "{} -> {} ({}x{}, {} ink pixels)",
                input.display(),
                roi_path.display(),
                roi.width(),
                roi.height(),
                roi.count_ones()
            );
            Ok(())
        }
        TraceStatus::BlankInput => {
            eprintln!(
                "warning: blank_input: no foreground detected in {}",
                input.display()
            );
            Ok(())
        }
        TraceStatus::Error(msg) => Err(CliError::process(msg)),
    }
}

fn format_corpus_report(report: &CorpusReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "name\tstatus\troi\tink\ttotal_ms");
    for item in &report.items {
        let (status, roi, ink) = match (&item.status, &item.roi) {
            (ItemStatus::Ok, Some(roi)) => (
                "ok".to_string(),
                format!("{}x{}", roi.width(), roi.height()),
                roi.count_ones().to_string(),
            ),
            (ItemStatus::Blank, _) => ("blank_input".to_string(), "-".into(), "-".into()),
            (ItemStatus::Error(e), _) => (format!("error: {e}"), "-".into(), "-".into()),
            (ItemStatus::Ok, None) => unreachable!("ok item carries a roi"),
        };
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.3}",
            item.name,
            status,
            roi,
            ink,
            item.total.as_secs_f64() * 1e3
        );
    }
    let _ = writeln!(out, "\nstage\ttotal_ms\tmean_ms");
    let n = report.items.len().max(1);
    for (name, total) in report.aggregate_stage_durations() {
        let _ = writeln!(
            out,
            "{}\t{:.3}\t{:.3}",
            name,
            total.as_secs_f64() * 1e3,
            total.as_secs_f64() * 1e3 / n as f64
        );
    }
    let _ = writeln!(
        out,
        "\n{} images, {} errors, {} blank, {:.1} ms wall",
        report.items.len(),
        report.error_count(),
        report.blank_count(),
        report.wall_time.as_secs_f64() * 1e3
    );
    out
}

fn cmd_corpus(settings: Settings) -> CliResult<()> {
    let source = match (&settings.input, settings.count) {
        (Some(_), Some(_)) => {
            return Err(CliError::usage(
                "corpus takes either --in DIR or --count N, not both",
            ))
        }
        (Some(dir), None) => CorpusSource::Directory(dir.clone()),
        (None, Some(count)) => CorpusSource::Generated { count },
        (None, None) => return Err(CliError::usage("corpus requires --in (or --count)")),
    };
    let cfg = settings.pipeline_config();
    cfg.validate().map_err(CliError::process)?;

    ensure_out_dir(&settings.out)?;
    let report = run_corpus(&source, &cfg).map_err(CliError::process)?;

    // refuse to overwrite corpus inputs with roi outputs
    if let CorpusSource::Directory(dir) = &source {
        let inputs: Vec<PathBuf> = report.items.iter().map(|i| dir.join(&i.name)).collect();
        let outputs: Vec<PathBuf> = report
            .items
            .iter()
            .map(|i| {
                settings
                    .out
                    .join(format!("{}.roi.p4m", input_stem(Path::new(&i.name))))
            })
            .collect();
        check_collisions(&inputs, &outputs)?;
    }

    for item in &report.items {
        if let (ItemStatus::Ok, Some(roi)) = (&item.status, &item.roi) {
            let path = settings
                .out
                .join(format!("{}.roi.p4m", input_stem(Path::new(&item.name))));
            netpbm::write_binary(roi, &path).map_err(CliError::process)?;
        }
        if let ItemStatus::Blank = item.status {
            eprintln!("warning: blank_input: {}", item.name);
        }
    }

    print!("{}", format_corpus_report(&report));

    if report.error_count() > 0 {
        Err(CliError::process(format!(
            "{} of {} images failed",
            report.error_count(),
            report.items.len()
        )))
    } else {
        Ok(())
    }
}

fn cmd_bench(settings: Settings) -> CliResult<()> {
    if settings.repeats == 0 {
        return Err(CliError::usage("--repeats must be at least 1"));
    }
    let cfg = BenchConfig {
        seed: settings.seed,
        count: settings.count.unwrap_or(5),
        repeats: settings.repeats,
        angles: angle_range(1.0),
        width: CANVAS_WIDTH,
        height: CANVAS_HEIGHT,
    };
    let report = run_bench(&cfg).map_err(CliError::process)?;
    let tsv = report.to_tsv();
    print!("{tsv}");
    ensure_out_dir(&settings.out)?;
    let path = settings.out.join("bench.tsv");
    std::fs::write(&path, &tsv)
        .map_err(|e| CliError::process(format!("cannot write {}: {e}", path.display())))?;
    eprintln!("report written to {}", path.display());
    Ok(())
}

fn cmd_generate(settings: Settings) -> CliResult<()> {
    let count = settings.count.unwrap_or(1);
    ensure_out_dir(&settings.out)?;
    for i in 0..count {
        let seed = settings.seed + i as u64;
        let img = generate_signature(seed, CANVAS_WIDTH, CANVAS_HEIGHT);
        let path = settings.out.join(format!("sig_{seed:04}.ppm"));
        netpbm::write_rgb(&img, &path).map_err(CliError::process)?;
    }
    println!("wrote {count} signatures to {}", settings.out.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_size_accepts_rxc() {
        assert_eq!(parse_size("128x256").unwrap(), (128, 256));
        assert_eq!(parse_size("8x8").unwrap(), (8, 8));
        assert!(parse_size("128").is_err());
        assert!(parse_size("0x4").is_err());
        assert!(parse_size("ax4").is_err());
    }

    #[test]
    fn config_precedence_flag_over_file_over_default() {
        let dir = tempfile::tempdir().unwrap();
        let config = dir.path().join("cfg");
        std::fs::write(&config, "size=64x64\nseed=9\n# comment\n\nedge=sobel\n").unwrap();
        let flags = FlagSet {
            config: Some(config),
            size: Some("32x32".into()),
            ..Default::default()
        };
        let settings = resolve_settings(&flags).unwrap();
        assert_eq!(settings.size, (32, 32)); // flag wins
        assert_eq!(settings.seed, 9); // config wins over default
        assert_eq!(settings.edge, EdgeOperator::Sobel);
        assert_eq!(settings.repeats, 11); // default
    }

    #[test]
    fn unknown_config_key_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let config = dir.path().join("cfg");
        std::fs::write(&config, "bogus=1\n").unwrap();
        let flags = FlagSet {
            config: Some(config),
            ..Default::default()
        };
        assert!(matches!(
            resolve_settings(&flags),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn bad_config_line_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let config = dir.path().join("cfg");
        std::fs::write(&config, "just a line\n").unwrap();
        let flags = FlagSet {
            config: Some(config),
            ..Default::default()
        };
        assert!(matches!(resolve_settings(&flags), Err(CliError::Usage(_))));
    }

    #[test]
    fn boolean_config_keys() {
        let dir = tempfile::tempdir().unwrap();
        let config = dir.path().join("cfg");
        std::fs::write(&config, "no-morph=true\nemit-stages=1\n").unwrap();
        let flags = FlagSet {
            config: Some(config),
            ..Default::default()
        };
        let settings = resolve_settings(&flags).unwrap();
        assert!(settings.no_morph);
        assert!(settings.emit_stages);
    }

    #[test]
    fn stage_file_names_follow_convention() {
        let gray = StageImage::Gray(crate::image::GrayImage::filled(2, 2, 0).unwrap());
        assert_eq!(stage_file_name("sig", 2, "resize", &gray), "sig.2.resize.p5m");
        let bin = StageImage::Binary(
            crate::image::BinaryImage::filled(2, 2, 0, crate::image::Convention::Ink1).unwrap(),
        );
        assert_eq!(
            stage_file_name("sig", 3, "binarize", &bin),
            "sig.3.binarize.p4m"
        );
    }
}
