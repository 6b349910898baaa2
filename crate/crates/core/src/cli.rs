//! `floorloc` subcommands.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::dataset::{
    load_annotations, load_detections, load_scene_config, write_annotations, write_detections, DatasetError,
};
use crate::evaluation::{cdf_to_csv, error_vs_distance, evaluate_run, group_by_scenario, EvalReport};
use crate::feet::{BodyLevel, BodyProportions};
use crate::pipeline::{
    camera_ids, fuse_tracks, load_positions, localize_cameras, merge_all, FusionDistance, Method, RunConfig,
};
use crate::synthetic::{generate_corpus, CorpusSpec, OcclusionPattern};
use crate::{Error, EXIT_OK};

#[derive(Debug, Parser)]
#[command(name = "floorloc", version, about = "Floor-plane localization from camera detections")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a scene's homography and print its parameters and residuals.
    Calibrate {
        #[arg(long, required = true)]
        scene: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn detections into a positions CSV.
    Localize(LocalizeArgs),
    /// Fuse per-camera positions CSVs.
    Fuse {
        #[arg(long = "scene", required = true)]
        scenes: Vec<PathBuf>,
        /// Positions CSV per camera, in scene order.
        #[arg(long = "positions", required = true)]
        positions: Vec<PathBuf>,
        #[arg(long, default_value = "floor")]
        fusion_distance: FusionDistance,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a positions CSV against ground truth.
    Evaluate {
        #[arg(long, required = true)]
        positions: PathBuf,
        /// Repeat to merge annotations from several perspectives.
        #[arg(long = "annotations", required = true)]
        annotations: Vec<PathBuf>,
        /// `frame_id,scenario` rows for a per-scenario breakdown.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Adds an error-versus-distance series for this camera.
        #[arg(long)]
        scene: Option<PathBuf>,
        /// Directory receiving `report.json` and `cdf.csv`; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic corpus.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct LocalizeArgs {
    #[arg(long = "scene", required = true)]
    pub scenes: Vec<PathBuf>,
    /// One per scene, paired by order.
    #[arg(long = "detections", required = true)]
    pub detections: Vec<PathBuf>,
    #[arg(long)]
    pub method: Option<Method>,
    #[arg(long)]
    pub conf_threshold: Option<f64>,
    /// Target height/width for `bbox-extended`.
    #[arg(long)]
    pub aspect: Option<f64>,
    #[arg(long)]
    pub fuse: bool,
    /// `key = value` run settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub frames: usize,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub cameras: u8,
    #[arg(long, default_value = "none")]
    pub occlusion: OcclusionPattern,
    /// Gaussian pixel noise per joint.
    #[arg(long, default_value_t = 0.0)]
    pub jitter: f64,
    /// Per-camera dropout probability; a single value applies to every camera.
    #[arg(long = "dropout")]
    pub dropout: Vec<f64>,
    /// Run settings whose proportion table shapes the synthetic person.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, required = true)]
    pub out: PathBuf,
}

/// Parses `args` (including the program name) and runs the command;
/// returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Calibrate { scene, out } => cmd_calibrate(&scene, out.as_deref()),
        Command::Localize(args) => cmd_localize(&args),
        Command::Fuse {
            scenes,
            positions,
            fusion_distance,
            out,
        } => cmd_fuse(&scenes, &positions, fusion_distance, out.as_deref()),
        Command::Evaluate {
            positions,
            annotations,
            labels,
            scene,
            out,
        } => cmd_evaluate(&positions, &annotations, labels.as_deref(), scene.as_deref(), out.as_deref()),
        Command::Synth(args) => cmd_synth(&args),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

#[derive(Serialize)]
struct CalibrationOutput {
    camera_id: Option<String>,
    params: [f64; 8],
    residuals: Vec<f64>,
}

pub fn cmd_calibrate(scene: &Path, out: Option<&Path>) -> Result<(), Error> {
    let config = load_scene_config(scene)?;
    let h = config.homography()?;
    let output = CalibrationOutput {
        camera_id: config.camera_id.clone(),
        params: h.params(),
        residuals: h.residuals(&config.homography_points, &config.map_points()),
    };
    let mut text = serde_json::to_string_pretty(&output).expect("finite values");
    text.push('\n');
    emit(out, &text)
}

/// Run settings from a `key = value` file.
///
/// Keys: `method`, `conf_threshold`, `aspect`, `extension`,
/// `fusion_distance`, `ankle_ground_fraction` and `level.<head|shoulder|hip|knee|ankle>`.
pub fn parse_run_settings(text: &str, cfg: &mut RunConfig) -> Result<(), DatasetError> {
    let err = |line, message: String| DatasetError::Parse {
        source_name: None,
        line,
        message,
    };
    let mut levels: BTreeMap<BodyLevel, f64> = BodyLevel::ALL
        .into_iter()
        .map(|l| (l, cfg.skeleton.proportions.fraction(l)))
        .collect();
    let mut ankle_ground_fraction = cfg.skeleton.proportions.ankle_ground_fraction;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(line, "expected `key = value`".into()))?;
        let (key, value) = (key.trim(), value.trim());
        let number = || -> Result<f64, DatasetError> {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(line, format!("{key}: `{value}` is not a number")))
        };
        match key {
            "method" => cfg.method = value.parse().map_err(|e| err(line, e))?,
            "conf_threshold" => cfg.skeleton.conf_threshold = number()?,
            "aspect" => cfg.bbox_aspect = number()?,
            "extension" => cfg.skeleton.extension = value.parse().map_err(|e| err(line, e))?,
            "fusion_distance" => cfg.fusion_distance = value.parse().map_err(|e| err(line, e))?,
            "ankle_ground_fraction" => ankle_ground_fraction = number()?,
            _ => match key.strip_prefix("level.") {
                Some(level) => {
                    let level: BodyLevel = level.parse().map_err(|e: crate::feet::FeetError| err(line, e.to_string()))?;
                    levels.insert(level, number()?);
                }
                None => return Err(err(line, format!("unknown key `{key}`"))),
            },
        }
    }
    let levels: [(BodyLevel, f64); 5] = BodyLevel::ALL.map(|l| (l, levels[&l]));
    cfg.skeleton.proportions = BodyProportions::new(levels, ankle_ground_fraction)
        .map_err(|e| DatasetError::validation(e.to_string()))?;
    Ok(())
}

fn load_run_settings(path: &Path, cfg: &mut RunConfig) -> Result<(), Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_run_settings(&text, cfg).map_err(|e| Error::Dataset(e.in_file(path)))
}

pub fn cmd_localize(args: &LocalizeArgs) -> Result<(), Error> {
    if args.scenes.len() != args.detections.len() {
        return Err(Error::Usage(format!(
            "{} --scene but {} --detections",
            args.scenes.len(),
            args.detections.len()
        )));
    }
    if args.scenes.len() > 1 && !args.fuse {
        return Err(Error::Usage(
            "several cameras need --fuse; localize them one at a time otherwise".into(),
        ));
    }
    let scenes = args
        .scenes
        .iter()
        .map(|p| load_scene_config(p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut cfg = RunConfig::new(scenes);
    if let Some(path) = &args.config {
        load_run_settings(path, &mut cfg)?;
    }
    if let Some(m) = args.method {
        cfg.method = m;
    }
    if let Some(t) = args.conf_threshold {
        cfg.skeleton.conf_threshold = t;
    }
    if let Some(a) = args.aspect {
        cfg.bbox_aspect = a;
    }
    cfg.fuse = args.fuse;
    cfg.jobs = args.jobs;
    let detections = args
        .detections
        .iter()
        .map(|p| load_detections(p))
        .collect::<Result<Vec<_>, _>>()?;
    let tracks = localize_cameras(&detections, &Default::default(), &cfg)?;
    let track = if cfg.fuse {
        let cams: Vec<_> = cfg
            .camera_ids()
            .into_iter()
            .zip(cfg.scenes.iter().map(|s| s.camera_config()))
            .collect();
        fuse_tracks(&tracks, &cams, cfg.fusion_distance)?
    } else {
        tracks.into_iter().next().expect("one camera")
    };
    emit(args.out.as_deref(), &track.to_csv())
}

pub fn cmd_fuse(
    scenes: &[PathBuf],
    positions: &[PathBuf],
    distance: FusionDistance,
    out: Option<&Path>,
) -> Result<(), Error> {
    if scenes.len() != positions.len() {
        return Err(Error::Usage(format!(
            "{} --scene but {} --positions",
            scenes.len(),
            positions.len()
        )));
    }
    let scenes = scenes
        .iter()
        .map(|p| load_scene_config(p))
        .collect::<Result<Vec<_>, _>>()?;
    for s in &scenes {
        s.validate()?;
    }
    let tracks = positions
        .iter()
        .map(|p| load_positions(p))
        .collect::<Result<Vec<_>, _>>()?;
    let cams: Vec<_> = camera_ids(&scenes)
        .into_iter()
        .zip(scenes.iter().map(|s| s.camera_config()))
        .collect();
    let fused = fuse_tracks(&tracks, &cams, distance)?;
    emit(out, &fused.to_csv())
}

#[derive(Serialize)]
struct DistanceSummary {
    camera_id: Option<String>,
    n: usize,
    correlation: f64,
    degenerate: bool,
}

#[derive(Serialize)]
struct EvaluationOutput {
    overall: EvalReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    by_scenario: Option<BTreeMap<String, EvalReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error_vs_distance: Option<DistanceSummary>,
}

/// `frame_id,label` rows.
pub fn parse_labels(text: &str) -> Result<BTreeMap<u64, String>, DatasetError> {
    let mut labels = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| DatasetError::Parse {
            source_name: None,
            line,
            message,
        };
        let (frame, label) = content
            .split_once(',')
            .ok_or_else(|| parse_err("expected `frame_id,label`".into()))?;
        let frame: u64 = frame
            .trim()
            .parse()
            .map_err(|_| parse_err(format!("frame id `{}` is not a non-negative integer", frame.trim())))?;
        if labels.insert(frame, label.trim().to_string()).is_some() {
            return Err(DatasetError::DuplicateFrame {
                source_name: None,
                frame,
                line,
            });
        }
    }
    Ok(labels)
}

pub fn cmd_evaluate(
    positions: &Path,
    annotations: &[PathBuf],
    labels: Option<&Path>,
    scene: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), Error> {
    let track = load_positions(positions)?;
    let sets = annotations
        .iter()
        .map(|p| load_annotations(p))
        .collect::<Result<Vec<_>, _>>()?;
    let gt = merge_all(&sets);
    let predictions = track.predictions();
    let overall = evaluate_run(&predictions, &gt)?;
    let by_scenario = match labels {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let labels = parse_labels(&text).map_err(|e| e.in_file(path))?;
            let groups = group_by_scenario(&predictions, &gt, &labels)?;
            Some(groups.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
        }
        None => None,
    };
    let error_vs_distance = match scene {
        Some(path) => {
            let s = load_scene_config(path)?;
            let series = error_vs_distance(&predictions, &gt, &s.camera_config())?;
            Some(DistanceSummary {
                camera_id: s.camera_id.clone(),
                n: series.pairs.len(),
                correlation: series.correlation,
                degenerate: series.degenerate,
            })
        }
        None => None,
    };
    let cdf = cdf_to_csv(&overall.cdf);
    let output = EvaluationOutput {
        overall,
        by_scenario,
        error_vs_distance,
    };
    let mut json = serde_json::to_string_pretty(&output).expect("finite values");
    json.push('\n');
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            emit(Some(&dir.join("report.json")), &json)?;
            emit(Some(&dir.join("cdf.csv")), &cdf)
        }
        None => emit(None, &json),
    }
}

pub fn cmd_synth(args: &SynthArgs) -> Result<(), Error> {
    let mut spec = CorpusSpec::s1(args.cameras as usize, args.frames, args.seed);
    if let Some(path) = &args.config {
        let mut cfg = RunConfig::new(Vec::new());
        load_run_settings(path, &mut cfg)?;
        spec.proportions = cfg.skeleton.proportions;
    }
    spec.occlusion = args.occlusion;
    spec.jitter_sigma = args.jitter;
    spec.dropout = match args.dropout.as_slice() {
        [] => vec![0.0; spec.cameras.len()],
        [p] => vec![*p; spec.cameras.len()],
        many => many.to_vec(),
    };
    if spec.dropout.len() != spec.cameras.len() {
        return Err(Error::Usage(format!(
            "{} --dropout values for {} camera(s)",
            spec.dropout.len(),
            spec.cameras.len()
        )));
    }
    let corpus = generate_corpus(&spec)?;
    let dir = &args.out;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for cam in &corpus.cameras {
        let id = cam.scene.camera_id.clone().expect("synthetic scenes are named");
        emit(Some(&dir.join(format!("scene_{id}.cfg"))), &cam.scene.to_text())?;
        emit(Some(&dir.join(format!("pose_{id}.det"))), &write_detections(&cam.pose))?;
        emit(Some(&dir.join(format!("bbox_{id}.det"))), &write_detections(&cam.bbox))?;
    }
    emit(Some(&dir.join("annotations.csv")), &write_annotations(&corpus.annotations))?;
    let labels: String = corpus
        .labels
        .iter()
        .map(|(frame, label)| format!("{frame},{label}\n"))
        .collect();
    emit(Some(&dir.join("labels.csv")), &labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feet::ExtensionMode;

    #[test]
    fn run_settings() {
        let mut cfg = RunConfig::new(Vec::new());
        let text = "# tall torso\nmethod = bbox-extended\naspect = 3\nextension = vertical-drop\n\
                    level.shoulder = 0.9\nlevel.head = 0.97\nankle_ground_fraction = 0\n";
        parse_run_settings(text, &mut cfg).unwrap();
        assert_eq!(cfg.method, Method::BboxExtended);
        assert_eq!(cfg.bbox_aspect, 3.0);
        assert_eq!(cfg.skeleton.extension, ExtensionMode::VerticalDrop);
        assert_eq!(cfg.skeleton.proportions.fraction(BodyLevel::Shoulder), 0.9);
        assert_eq!(cfg.skeleton.proportions.fraction(BodyLevel::Hip), 0.52);
    }

    #[test]
    fn run_settings_errors_name_the_line() {
        let mut cfg = RunConfig::new(Vec::new());
        let e = parse_run_settings("aspect = 2\nspeed = 3\n", &mut cfg).unwrap_err();
        assert!(matches!(e, DatasetError::Parse { line: 2, .. }), "{e}");
        let e = parse_run_settings("level.knee = 0.6\n", &mut cfg).unwrap_err();
        assert!(matches!(e, DatasetError::Validation { .. }), "{e}");
    }

    #[test]
    fn labels() {
        let l = parse_labels("0,baseline\n3, table_standing \n").unwrap();
        assert_eq!(l[&3], "table_standing");
        assert!(matches!(parse_labels("1,a\n1,b\n"), Err(DatasetError::DuplicateFrame { frame: 1, .. })));
    }
}
