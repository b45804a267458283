use std::fs;
use std::path::Path;

use serde_json::json;
use svwb_core::balance::{correct_image_multicolor, correct_image_svwb_with, correct_image_wb_with, multicolor_matrix};
use svwb_core::color::{AdaptationModel, ModelKind, Tristimulus};
use svwb_core::compare::{compare_images, compare_scene};
use svwb_core::estimation::{estimate_gray_world, estimate_max_rgb_with, region_mean, MaxRgb};
use svwb_core::image::{LinearImage, RegionOfInterest};
use svwb_core::imageio::{
    load_anchor_config, load_image, load_layout, save_image, write_json, AnchorConfig, BitDepth, Encoding,
};
use svwb_core::metrics::{evaluate_chart, heatmap};
use svwb_core::synth::{Preset, SceneSpec};
use svwb_core::{Error, Execution, Result};

use crate::{CompareArgs, CorrectArgs, EstimateArgs, Estimator, EvaluateArgs, Method, SceneSource, SynthArgs};

fn encoding(linear: bool) -> Encoding {
    if linear {
        Encoding::Linear
    } else {
        Encoding::Srgb
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn warn_clipped(path: &Path, clipped: usize) {
    if clipped > 0 {
        eprintln!("warning: {clipped} pixels of {} were clamped into the sRGB gamut", path.display());
    }
}

pub fn correct(args: CorrectArgs, exec: Execution) -> Result<()> {
    let enc = encoding(args.linear);
    let img = load_image(&args.input, enc)?;
    let cfg = load_anchor_config(&args.anchors, &img)?;
    let kind = args.model.map(ModelKind::from).or(cfg.model).unwrap_or(ModelKind::Bradford);
    let model = AdaptationModel::new(kind);
    let out = match args.method {
        Method::Wb => {
            let a = cfg.anchors[0];
            if cfg.anchors.len() > 1 {
                eprintln!("warning: wb uses only the first of {} anchors", cfg.anchors.len());
            }
            correct_image_wb_with(&img, &model, a.source, a.target, exec)?
        }
        Method::Svwb => correct_image_svwb_with(&img, &model, &cfg.anchors, exec)?,
        Method::Multicolor => {
            let sources: Vec<Tristimulus> = cfg.anchors.iter().map(|a| a.source).collect();
            let targets: Vec<Tristimulus> = cfg.anchors.iter().map(|a| a.target).collect();
            let fit = multicolor_matrix(&sources, &targets)?;
            if fit.deficient {
                eprintln!(
                    "warning: calibration colors are rank deficient (condition number {:.3e}); \
                     using the minimum-norm fit",
                    fit.condition_number
                );
            }
            let report = json!({
                "method": "multicolor",
                "colors": sources.len(),
                "condition_number": fit.condition_number.is_finite().then_some(fit.condition_number),
                "deficient": fit.deficient,
                "fit": fit.method,
                "matrix": fit.matrix.rows(),
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            correct_image_multicolor(&img, &fit)
        }
    };
    let clipped = save_image(&out, &args.output, BitDepth::from_bits(args.bit_depth)?, enc)?;
    warn_clipped(&args.output, clipped);
    Ok(())
}

pub fn evaluate(args: EvaluateArgs) -> Result<()> {
    let enc = encoding(args.linear);
    let adjusted = load_image(&args.adjusted, enc)?;
    let reference = load_image(&args.reference, enc)?;
    let layout = load_layout(&args.layout)?;
    let report = evaluate_chart(&adjusted, &reference, &layout)?;
    let text = if args.json { report.to_json() + "\n" } else { report.to_text() };
    match &args.report {
        Some(path) => write_text(path, &text)?,
        None => print!("{text}"),
    }
    if let Some(path) = &args.heatmap {
        let map = heatmap(&report, &layout, args.scale_max)?;
        save_image(&map, path, BitDepth::Eight, Encoding::Srgb)?;
    }
    Ok(())
}

fn parse_roi(text: &str) -> Result<RegionOfInterest> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Config {
            field: "roi".into(),
            message: format!("`{text}`: {e}"),
        })?;
    match parts.as_slice() {
        [x0, y0, w, h] => Ok(RegionOfInterest::new(*x0, *y0, *w, *h)),
        _ => Err(Error::Config {
            field: "roi".into(),
            message: format!("expected x0,y0,width,height, got `{text}`"),
        }),
    }
}

fn estimate_white(img: &LinearImage, args: &EstimateArgs) -> Result<Tristimulus> {
    match args.estimator {
        Estimator::GrayWorld => estimate_gray_world(img),
        Estimator::MaxRgb => {
            let mode = match (args.strict_max, args.percentile) {
                (true, _) => MaxRgb::Strict,
                (false, Some(p)) => MaxRgb::Percentile(p),
                (false, None) => MaxRgb::default(),
            };
            estimate_max_rgb_with(img, mode)
        }
        Estimator::Region => {
            let roi = args.roi.as_deref().ok_or_else(|| Error::Config {
                field: "roi".into(),
                message: "the region estimator needs --roi x0,y0,width,height".into(),
            })?;
            region_mean(img, &parse_roi(roi)?)?.normalized_to_unit_y()
        }
    }
}

pub fn estimate(args: EstimateArgs) -> Result<()> {
    let img = load_image(&args.input, encoding(args.linear))?;
    let white = estimate_white(&img, &args)?;
    if args.json {
        println!("{}", json!({ "xyz": white.to_array() }));
    } else {
        println!("{:.6} {:.6} {:.6}", white.x, white.y, white.z);
    }
    Ok(())
}

fn scene_spec(src: &SceneSource, fallback: Preset) -> Result<SceneSpec> {
    match (&src.spec, &src.preset) {
        (Some(path), _) => svwb_core::imageio::read_json(path),
        (None, Some(name)) => Ok(SceneSpec::preset(name.parse()?)),
        (None, None) => Ok(SceneSpec::preset(fallback)),
    }
}

pub fn synth(args: SynthArgs) -> Result<()> {
    let mut spec = scene_spec(&args.scene, Preset::Mixed)?;
    let scene = spec.build()?;
    let dir = &args.out_dir;
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.clone(),
        source,
    })?;
    for (name, img) in [("observed.png", &scene.observed), ("ground_truth.png", &scene.ground_truth)] {
        let path = dir.join(name);
        let clipped = save_image(img, &path, BitDepth::Sixteen, Encoding::Linear)?;
        warn_clipped(&path, clipped);
    }
    write_json(dir.join("anchors.json"), &AnchorConfig::from_anchors(None, &scene.true_anchors))?;
    write_json(dir.join("layout.json"), &scene.layout)?;
    spec.white_coords = Some(scene.true_anchors.iter().map(|a| a.coord).collect());
    write_json(dir.join("scene.json"), &spec)?;
    println!(
        "wrote {}x{} scene with {} anchors to {} (16-bit linear PNG; use --linear to read)",
        scene.observed.width(),
        scene.observed.height(),
        scene.true_anchors.len(),
        dir.display()
    );
    Ok(())
}

pub fn compare(args: CompareArgs) -> Result<()> {
    let model = ModelKind::from(args.model);
    let cmp = match &args.observed {
        None => compare_scene(&scene_spec(&args.scene, Preset::Mixed)?.build()?, model)?,
        Some(observed) => {
            let enc = encoding(args.linear);
            let observed = load_image(observed, enc)?;
            let reference = load_image(args.reference.as_ref().expect("clap enforces --reference"), enc)?;
            let layout = load_layout(args.layout.as_ref().expect("clap enforces --layout"))?;
            let anchors = load_anchor_config(args.anchors.as_ref().expect("clap enforces --anchors"), &observed)?;
            let calibration = match &args.calibration {
                Some(path) => load_anchor_config(path, &observed)?
                    .anchors
                    .iter()
                    .map(|a| (a.source, a.target))
                    .collect(),
                None => Vec::new(),
            };
            compare_images(&observed, &reference, &layout, &anchors.anchors, &calibration, model)?
        }
    };
    if args.json {
        println!("{}", cmp.to_json());
    } else {
        print!("{}", cmp.to_text());
    }
    Ok(())
}
