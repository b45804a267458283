//! Synthetic color-chart scenes under known illuminant fields.
//!
//! A scene is a flat-filled chart (the ground truth) and the same chart with a
//! per-pixel diagonal XYZ gain applied (the observation). Because the gains
//! are known, the true source white at any coordinate is known too, which
//! makes end-to-end correction checks exact.

use serde::{Deserialize, Serialize};

use crate::balance::{fill_weights, validate_coords, WhitePointAnchor};
use crate::color::Tristimulus;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::image::{LinearImage, PixelCoord, RegionOfInterest};
use crate::metrics::{ChartLayout, PatchSpec};

/// Warm (tungsten-like) gain used by the single and mixed presets.
pub const WARM_GAIN: [f64; 3] = [1.15, 1.0, 0.75];
/// Cool (daylight/sky-like) gain used by the mixed preset.
pub const COOL_GAIN: [f64; 3] = [0.8, 1.0, 1.25];
/// Direct-light end of the non-uniform (shade) preset.
pub const SUNLIT_GAIN: [f64; 3] = [1.08, 1.0, 0.85];
/// Shaded end of the non-uniform preset: darker and bluer.
pub const SHADE_GAIN: [f64; 3] = [0.5, 0.55, 0.8];

pub const DEFAULT_SCENE_SIZE: usize = 512;

const DEFAULT_CHART_JSON: &str = include_str!("../data/default_chart.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatchKind {
    White,
    Neutral,
    Black,
    Chromatic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartPatch {
    pub label: String,
    pub roi: RegionOfInterest,
    pub kind: PatchKind,
    pub color: Tristimulus,
}

#[derive(Deserialize)]
struct ChartData {
    rows: usize,
    cols: usize,
    background: [f64; 3],
    patches: Vec<PatchData>,
}

#[derive(Deserialize)]
struct PatchData {
    label: String,
    row: usize,
    col: usize,
    kind: PatchKind,
    xyz: [f64; 3],
}

/// A grid chart bound to an image size.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub width: usize,
    pub height: usize,
    pub background: Tristimulus,
    pub patches: Vec<ChartPatch>,
}

fn cell_span(index: usize, cell: f64) -> (usize, usize) {
    let start = (index as f64 * cell + 0.1 * cell).round() as usize;
    let end = ((index + 1) as f64 * cell - 0.1 * cell).round() as usize;
    (start, end - start)
}

impl Chart {
    /// The built-in 4x6 chart: two white patches at the top-right and
    /// bottom-left corners, a neutral ramp ending in pure black along the
    /// bottom row, and 17 chromatic patches.
    pub fn default_chart(width: usize, height: usize) -> Result<Chart> {
        let data: ChartData = serde_json::from_str(DEFAULT_CHART_JSON)
            .expect("bundled chart data is valid");
        if width < data.cols * 4 || height < data.rows * 4 {
            return Err(Error::InvalidLayout(format!(
                "the default chart needs at least {}x{} pixels",
                data.cols * 4,
                data.rows * 4
            )));
        }
        let cw = width as f64 / data.cols as f64;
        let ch = height as f64 / data.rows as f64;
        let patches = data
            .patches
            .into_iter()
            .map(|p| {
                let (x0, w) = cell_span(p.col, cw);
                let (y0, h) = cell_span(p.row, ch);
                ChartPatch {
                    label: p.label,
                    roi: RegionOfInterest::new(x0, y0, w, h),
                    kind: p.kind,
                    color: Tristimulus::from_array(p.xyz),
                }
            })
            .collect();
        Ok(Chart {
            width,
            height,
            background: Tristimulus::from_array(data.background),
            patches,
        })
    }

    pub fn layout(&self) -> ChartLayout {
        ChartLayout {
            width: self.width,
            height: self.height,
            patches: self
                .patches
                .iter()
                .map(|p| PatchSpec {
                    label: p.label.clone(),
                    roi: p.roi,
                    is_black: p.kind == PatchKind::Black,
                })
                .collect(),
        }
    }

    pub fn patch(&self, label: &str) -> Option<&ChartPatch> {
        self.patches.iter().find(|p| p.label == label)
    }

    pub fn patch_at(&self, p: PixelCoord) -> Option<&ChartPatch> {
        self.patches.iter().find(|q| q.roi.contains(p))
    }

    pub fn white_patches(&self) -> impl Iterator<Item = &ChartPatch> {
        self.patches.iter().filter(|p| p.kind == PatchKind::White)
    }

    /// Centers of the white patches, in chart order.
    pub fn default_white_coords(&self) -> Vec<PixelCoord> {
        self.white_patches().map(|p| p.roi.center()).collect()
    }

    pub fn color_at(&self, col: usize, row: usize) -> Tristimulus {
        self.patch_at(PixelCoord::pixel_center(col, row))
            .map_or(self.background, |p| p.color)
    }

    pub fn render(&self) -> LinearImage {
        let mut img = LinearImage::filled(self.width, self.height, self.background)
            .expect("chart dimensions are positive");
        for p in &self.patches {
            for row in p.roi.y0..p.roi.y0 + p.roi.height {
                for col in p.roi.x0..p.roi.x0 + p.roi.width {
                    img.set(col, row, p.color);
                }
            }
        }
        img
    }
}

/// How a two-source field mixes its gains between the sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GainBlend {
    /// `sum k_m g_m`: the two lights add.
    #[default]
    Arithmetic,
    /// `1 / sum (k_m / g_m)`: the inverse gains blend, so a weighted sum of
    /// per-source diagonal corrections undoes the field exactly.
    Reciprocal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IlluminantField {
    Uniform {
        gain: [f64; 3],
    },
    TwoSourceBlend {
        gains: [[f64; 3]; 2],
        sources: [PixelCoord; 2],
        #[serde(default)]
        blend: GainBlend,
    },
    LinearGradient {
        gains: [[f64; 3]; 2],
        start: PixelCoord,
        end: PixelCoord,
    },
}

fn check_gain(g: &[f64; 3]) -> Result<()> {
    if g.iter().all(|v| v.is_finite() && *v > 0.0) {
        Ok(())
    } else {
        Err(Error::InvalidField(format!("gain {g:?} must be finite and strictly positive")))
    }
}

impl IlluminantField {
    pub fn validate(&self) -> Result<()> {
        match self {
            IlluminantField::Uniform { gain } => check_gain(gain),
            IlluminantField::TwoSourceBlend { gains, sources, .. } => {
                gains.iter().try_for_each(check_gain)?;
                validate_coords(sources)
                    .map_err(|e| Error::InvalidField(format!("field sources: {e}")))
            }
            IlluminantField::LinearGradient { gains, start, end } => {
                gains.iter().try_for_each(check_gain)?;
                if !(start.is_finite() && end.is_finite()) || start == end {
                    return Err(Error::InvalidField(
                        "gradient endpoints must be finite and distinct".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Diagonal gain of `field` at `p`. The field must be valid.
pub fn field_gain(field: &IlluminantField, p: PixelCoord) -> [f64; 3] {
    match field {
        IlluminantField::Uniform { gain } => *gain,
        IlluminantField::TwoSourceBlend {
            gains,
            sources,
            blend,
        } => {
            let mut k = [0.0; 2];
            fill_weights(p, sources, &mut k);
            match blend {
                GainBlend::Arithmetic => {
                    [0, 1, 2].map(|c| k[0] * gains[0][c] + k[1] * gains[1][c])
                }
                GainBlend::Reciprocal => {
                    [0, 1, 2].map(|c| 1.0 / (k[0] / gains[0][c] + k[1] / gains[1][c]))
                }
            }
        }
        IlluminantField::LinearGradient { gains, start, end } => {
            let ax = end.x - start.x;
            let ay = end.y - start.y;
            let t = (((p.x - start.x) * ax + (p.y - start.y) * ay) / (ax * ax + ay * ay)).clamp(0.0, 1.0);
            [0, 1, 2].map(|c| gains[0][c] + t * (gains[1][c] - gains[0][c]))
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticScene {
    pub chart: Chart,
    pub field: IlluminantField,
    pub ground_truth: LinearImage,
    pub observed: LinearImage,
    pub layout: ChartLayout,
    pub true_anchors: Vec<WhitePointAnchor>,
}

pub fn render_scene(
    chart: &Chart,
    field: &IlluminantField,
    white_coords: &[PixelCoord],
) -> Result<SyntheticScene> {
    render_scene_with(chart, field, white_coords, Execution::default())
}

pub fn render_scene_with(
    chart: &Chart,
    field: &IlluminantField,
    white_coords: &[PixelCoord],
    execution: Execution,
) -> Result<SyntheticScene> {
    field.validate()?;
    let mut true_anchors = Vec::with_capacity(white_coords.len());
    for (i, &coord) in white_coords.iter().enumerate() {
        let white = match chart.patch_at(coord) {
            Some(p) if p.kind == PatchKind::White => p.color,
            _ => {
                return Err(Error::config(
                    format!("white_coords[{i}]"),
                    format!("({}, {}) is not inside a white patch", coord.x, coord.y),
                ))
            }
        };
        true_anchors.push(WhitePointAnchor::new(
            white.gained(field_gain(field, coord)),
            white,
            coord,
        ));
    }

    let ground_truth = chart.render();
    let mut observed = ground_truth.clone();
    exec::for_each_row(observed.pixels_mut(), chart.width, execution, |row, pixels| {
        for (col, px) in pixels.iter_mut().enumerate() {
            *px = px.gained(field_gain(field, PixelCoord::pixel_center(col, row)));
        }
    });

    Ok(SyntheticScene {
        chart: chart.clone(),
        field: field.clone(),
        ground_truth,
        observed,
        layout: chart.layout(),
        true_anchors,
    })
}

/// Field description inside a scene spec. Source and endpoint coordinates
/// default to the scene's white coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FieldSpec {
    Uniform {
        gain: [f64; 3],
    },
    TwoSourceBlend {
        gains: [[f64; 3]; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sources: Option<[PixelCoord; 2]>,
        #[serde(default)]
        blend: GainBlend,
    },
    LinearGradient {
        gains: [[f64; 3]; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        start: Option<PixelCoord>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        end: Option<PixelCoord>,
    },
}

fn default_size() -> usize {
    DEFAULT_SCENE_SIZE
}

fn default_chart_name() -> String {
    "default".to_string()
}

/// JSON scene description consumed by `svwb synth` and `svwb compare`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSpec {
    #[serde(default = "default_size")]
    pub width: usize,
    #[serde(default = "default_size")]
    pub height: usize,
    #[serde(default = "default_chart_name")]
    pub chart: String,
    pub field: FieldSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub white_coords: Option<Vec<PixelCoord>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Uniform warm illuminant.
    Single,
    /// Warm and cool lights meeting across the chart (arithmetic mix).
    Mixed,
    /// Mixed scene whose field is exactly invertible by the anchor blend.
    MixedExact,
    /// Sunlit-to-shade gradient between the white patches.
    NonUniform,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Single, Preset::Mixed, Preset::MixedExact, Preset::NonUniform];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Single => "single",
            Preset::Mixed => "mixed",
            Preset::MixedExact => "mixed-exact",
            Preset::NonUniform => "non-uniform",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::config("preset", format!("unknown preset `{s}`")))
    }
}

impl SceneSpec {
    pub fn preset(preset: Preset) -> SceneSpec {
        let field = match preset {
            Preset::Single => FieldSpec::Uniform { gain: WARM_GAIN },
            Preset::Mixed => FieldSpec::TwoSourceBlend {
                gains: [WARM_GAIN, COOL_GAIN],
                sources: None,
                blend: GainBlend::Arithmetic,
            },
            Preset::MixedExact => FieldSpec::TwoSourceBlend {
                gains: [WARM_GAIN, COOL_GAIN],
                sources: None,
                blend: GainBlend::Reciprocal,
            },
            Preset::NonUniform => FieldSpec::LinearGradient {
                gains: [SUNLIT_GAIN, SHADE_GAIN],
                start: None,
                end: None,
            },
        };
        SceneSpec {
            width: DEFAULT_SCENE_SIZE,
            height: DEFAULT_SCENE_SIZE,
            chart: default_chart_name(),
            field,
            white_coords: None,
        }
    }

    pub fn from_json(text: &str) -> Result<SceneSpec> {
        crate::imageio::parse_json(text)
    }

    pub fn chart(&self) -> Result<Chart> {
        match self.chart.as_str() {
            "default" => Chart::default_chart(self.width, self.height),
            other => Err(Error::config("chart", format!("unknown chart `{other}`"))),
        }
    }

    /// Resolve defaults into a concrete field and white-coordinate list.
    pub fn resolve(&self, chart: &Chart) -> Result<(IlluminantField, Vec<PixelCoord>)> {
        let whites = self
            .white_coords
            .clone()
            .unwrap_or_else(|| chart.default_white_coords());
        let pair = || -> Result<[PixelCoord; 2]> {
            match whites.as_slice() {
                [a, b, ..] => Ok([*a, *b]),
                _ => Err(Error::config(
                    "field",
                    "at least two white coordinates are needed to place the field",
                )),
            }
        };
        let field = match &self.field {
            FieldSpec::Uniform { gain } => IlluminantField::Uniform { gain: *gain },
            FieldSpec::TwoSourceBlend {
                gains,
                sources,
                blend,
            } => IlluminantField::TwoSourceBlend {
                gains: *gains,
                sources: match sources {
                    Some(s) => *s,
                    None => pair()?,
                },
                blend: *blend,
            },
            FieldSpec::LinearGradient { gains, start, end } => {
                let (start, end) = match (start, end) {
                    (Some(s), Some(e)) => (*s, *e),
                    _ => {
                        let [a, b] = pair()?;
                        (start.unwrap_or(a), end.unwrap_or(b))
                    }
                };
                IlluminantField::LinearGradient {
                    gains: *gains,
                    start,
                    end,
                }
            }
        };
        field.validate()?;
        Ok((field, whites))
    }

    pub fn build(&self) -> Result<SyntheticScene> {
        let chart = self.chart()?;
        let (field, whites) = self.resolve(&chart)?;
        render_scene(&chart, &field, &whites)
    }
}
