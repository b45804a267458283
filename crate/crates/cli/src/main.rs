mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::TypedValueParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use svwb_core::color::ModelKind;
use svwb_core::ErrorKind;

#[derive(Parser)]
#[command(name = "svwb", version, about = "Spatially varying white balancing")]
struct Cli {
    /// Run the correction kernels on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Correct an image with one of the balancing methods.
    Correct(CorrectArgs),
    /// Score an adjusted image against a reference on a chart layout.
    Evaluate(EvaluateArgs),
    /// Estimate the source white of an image.
    Estimate(EstimateArgs),
    /// Render a synthetic chart scene and its anchor/layout files.
    Synth(SynthArgs),
    /// Run every method on one scene and rank them.
    Compare(CompareArgs),
    /// Print the adaptation matrices and standard whites.
    Constants,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Method {
    Wb,
    Svwb,
    Multicolor,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Model {
    XyzScaling,
    VonKries,
    Bradford,
}

impl From<Model> for ModelKind {
    fn from(m: Model) -> Self {
        match m {
            Model::XyzScaling => ModelKind::XyzScaling,
            Model::VonKries => ModelKind::VonKries,
            Model::Bradford => ModelKind::Bradford,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Estimator {
    GrayWorld,
    MaxRgb,
    Region,
}

#[derive(Args)]
pub struct CorrectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "svwb")]
    pub method: Method,
    /// Anchor config (JSON). For `wb` only the first anchor is used; for
    /// `multicolor` every anchor is a calibration pair.
    #[arg(long)]
    pub anchors: PathBuf,
    /// Overrides the model named in the anchor config (default bradford).
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Treat input and output samples as linear RGB instead of sRGB-encoded.
    #[arg(long)]
    pub linear: bool,
    #[arg(long, default_value = "8", value_parser = clap::builder::PossibleValuesParser::new(["8", "16"])
        .map(|s| s.parse::<u32>().expect("listed values are numeric")))]
    pub bit_depth: u32,
}

#[derive(Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub adjusted: PathBuf,
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub layout: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Write a per-patch error heat map (PNG or PPM).
    #[arg(long)]
    pub heatmap: Option<PathBuf>,
    /// Error in degrees mapped to the top of the heat-map ramp.
    #[arg(long, default_value_t = svwb_core::metrics::DEFAULT_SCALE_MAX_DEGREES)]
    pub scale_max: f64,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub linear: bool,
}

#[derive(Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "gray-world")]
    pub estimator: Estimator,
    /// Region for the `region` estimator as `x0,y0,width,height`.
    #[arg(long)]
    pub roi: Option<String>,
    /// Use the strict per-channel maximum for `max-rgb`.
    #[arg(long, conflicts_with = "percentile")]
    pub strict_max: bool,
    /// Percentile for `max-rgb` (default 99.9).
    #[arg(long)]
    pub percentile: Option<f64>,
    #[arg(long)]
    pub linear: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args)]
pub struct SceneSource {
    /// Scene spec (JSON).
    #[arg(long, conflicts_with = "preset")]
    pub spec: Option<PathBuf>,
    /// Built-in scene: single, mixed, mixed-exact or non-uniform.
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub scene: SceneSource,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub scene: SceneSource,
    /// Observed image; compares files instead of a rendered scene.
    #[arg(long, requires_all = ["reference", "layout", "anchors"], conflicts_with_all = ["spec", "preset"])]
    pub observed: Option<PathBuf>,
    #[arg(long)]
    pub reference: Option<PathBuf>,
    #[arg(long)]
    pub layout: Option<PathBuf>,
    #[arg(long)]
    pub anchors: Option<PathBuf>,
    /// Calibration pairs for the multi-color fit, as an anchor config.
    #[arg(long)]
    pub calibration: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "bradford")]
    pub model: Model,
    #[arg(long)]
    pub linear: bool,
    #[arg(long)]
    pub json: bool,
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Config => 2,
        ErrorKind::Io => 3,
        ErrorKind::Numeric => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential {
        svwb_core::Execution::Sequential
    } else {
        svwb_core::Execution::default()
    };
    let result = match cli.command {
        Command::Correct(a) => commands::correct(a, exec),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::Synth(a) => commands::synth(a),
        Command::Compare(a) => commands::compare(a),
        Command::Constants => {
            print!("{}", svwb_core::color::reference_page());
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.kind()))
        }
    }
}
