//! Reproduction angular error and chart-level evaluation.
//!
//! Each patch is represented by its region mean in the adjusted image (`P`)
//! and in the reference image (`Q`); the patch error is the angle between
//! the two vectors in degrees. Mean and standard deviation (population form)
//! are taken over non-black patches only.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::color::{srgb_to_linear_xyz, Tristimulus};
use crate::error::{Error, Result};
use crate::estimation::region_mean;
use crate::image::{LinearImage, RegionOfInterest};

/// Default upper end of the heat-map color scale, in degrees.
pub const DEFAULT_SCALE_MAX_DEGREES: f64 = 10.0;

/// Heat-map ramp as `(position, sRGB-encoded color)` stops, interpolated
/// linearly in encoded sRGB.
pub const HEATMAP_RAMP: [(f64, [f64; 3]); 3] = [
    (0.0, [0.0, 0.0, 1.0]),
    (0.5, [1.0, 0.0, 1.0]),
    (1.0, [1.0, 0.0, 0.0]),
];

/// sRGB-encoded fill for excluded patches.
pub const HEATMAP_EXCLUDED: [f64; 3] = [0.5, 0.5, 0.5];

/// Angle in degrees between `p` and `q`.
///
/// Evaluated as `atan2(|p x q|, p . q)`, which equals the arccosine of the
/// normalized dot product but keeps full precision for nearly parallel
/// vectors. The result is always in `[0, 180]`.
pub fn reproduction_error(p: Tristimulus, q: Tristimulus) -> Result<f64> {
    if !(p.is_finite() && q.is_finite()) {
        return Err(Error::NonFinite { what: "color vector" });
    }
    if p.norm() == 0.0 || q.norm() == 0.0 {
        return Err(Error::UndefinedAngle);
    }
    let cross = Tristimulus::new(
        p.y * q.z - p.z * q.y,
        p.z * q.x - p.x * q.z,
        p.x * q.y - p.y * q.x,
    );
    let angle = cross.norm().atan2(p.dot(q)).to_degrees();
    Ok(angle.clamp(0.0, 180.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchSpec {
    pub label: String,
    pub roi: RegionOfInterest,
    #[serde(default)]
    pub is_black: bool,
}

/// Patch geometry bound to an image size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartLayout {
    pub width: usize,
    pub height: usize,
    pub patches: Vec<PatchSpec>,
}

impl ChartLayout {
    pub fn new(width: usize, height: usize, patches: Vec<PatchSpec>) -> Result<Self> {
        let layout = ChartLayout {
            width,
            height,
            patches,
        };
        layout.validate()?;
        Ok(layout)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidLayout("image dimensions must be positive".into()));
        }
        if !self.patches.iter().any(|p| !p.is_black) {
            return Err(Error::InvalidLayout("at least one non-black patch is required".into()));
        }
        let mut labels = HashSet::new();
        for (i, p) in self.patches.iter().enumerate() {
            p.roi.check_bounds(self.width, self.height)?;
            if !labels.insert(p.label.as_str()) {
                return Err(Error::InvalidLayout(format!("duplicate patch label `{}`", p.label)));
            }
            if let Some(q) = self.patches[..i].iter().find(|q| q.roi.overlaps(&p.roi)) {
                return Err(Error::InvalidLayout(format!(
                    "patches `{}` and `{}` overlap",
                    q.label, p.label
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExclusionReason {
    Black,
    ZeroNorm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatchError {
    pub label: String,
    /// `None` when the angle is undefined (a zero-length mean vector).
    pub error_degrees: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub label: String,
    pub reason: ExclusionReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub patches: Vec<PatchError>,
    pub mean: f64,
    pub std: f64,
    pub excluded: Vec<Exclusion>,
}

impl ErrorReport {
    pub fn error_of(&self, label: &str) -> Option<f64> {
        self.patches
            .iter()
            .find(|p| p.label == label)
            .and_then(|p| p.error_degrees)
    }

    pub fn is_excluded(&self, label: &str) -> bool {
        self.excluded.iter().any(|e| e.label == label)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Line-oriented report: one `patch` line per patch, then summary lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.patches {
            let err = match p.error_degrees {
                Some(e) => format!("{e:.6}"),
                None => "undefined".to_string(),
            };
            let note = self
                .excluded
                .iter()
                .find(|e| e.label == p.label)
                .map(|e| match e.reason {
                    ExclusionReason::Black => " excluded=black",
                    ExclusionReason::ZeroNorm => " excluded=zero-norm",
                })
                .unwrap_or("");
            writeln!(out, "patch {} {}{}", p.label, err, note).unwrap();
        }
        writeln!(out, "mean {:.6}", self.mean).unwrap();
        writeln!(out, "std {:.6}", self.std).unwrap();
        let labels: Vec<&str> = self.excluded.iter().map(|e| e.label.as_str()).collect();
        writeln!(out, "excluded {}", labels.join(",")).unwrap();
        out
    }
}

/// Per-patch reproduction errors between an adjusted image and its reference.
pub fn evaluate_chart(
    adjusted: &LinearImage,
    reference: &LinearImage,
    layout: &ChartLayout,
) -> Result<ErrorReport> {
    adjusted.same_shape(reference)?;
    if adjusted.width() != layout.width || adjusted.height() != layout.height {
        return Err(Error::ShapeMismatch(
            adjusted.width(),
            adjusted.height(),
            layout.width,
            layout.height,
        ));
    }
    layout.validate()?;

    let mut patches = Vec::with_capacity(layout.patches.len());
    let mut excluded = Vec::new();
    let mut counted = Vec::new();
    for spec in &layout.patches {
        let p = region_mean(adjusted, &spec.roi)?;
        let q = region_mean(reference, &spec.roi)?;
        let error = match reproduction_error(p, q) {
            Ok(e) => Some(e),
            Err(Error::UndefinedAngle) => None,
            Err(e) => return Err(e),
        };
        if spec.is_black {
            excluded.push(Exclusion {
                label: spec.label.clone(),
                reason: ExclusionReason::Black,
            });
        } else if let Some(e) = error {
            counted.push(e);
        } else {
            excluded.push(Exclusion {
                label: spec.label.clone(),
                reason: ExclusionReason::ZeroNorm,
            });
        }
        patches.push(PatchError {
            label: spec.label.clone(),
            error_degrees: error,
        });
    }
    if counted.is_empty() {
        return Err(Error::NoValidPatches);
    }
    let n = counted.len() as f64;
    let mean = counted.iter().sum::<f64>() / n;
    let var = counted.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n;
    Ok(ErrorReport {
        patches,
        mean,
        std: var.sqrt(),
        excluded,
    })
}

/// Encoded sRGB color of the ramp at `t` in `[0, 1]` (clamped).
pub fn ramp_color(t: f64) -> [f64; 3] {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    for w in HEATMAP_RAMP.windows(2) {
        let (t0, c0) = w[0];
        let (t1, c1) = w[1];
        if t <= t1 {
            let f = (t - t0) / (t1 - t0);
            return [0, 1, 2].map(|i| c0[i] + (c1[i] - c0[i]) * f);
        }
    }
    HEATMAP_RAMP[HEATMAP_RAMP.len() - 1].1
}

/// Render per-patch errors as solid fills on a black background.
pub fn heatmap(report: &ErrorReport, layout: &ChartLayout, scale_max_degrees: f64) -> Result<LinearImage> {
    if !(scale_max_degrees > 0.0 && scale_max_degrees.is_finite()) {
        return Err(Error::config(
            "scale_max",
            format!("must be positive, got {scale_max_degrees}"),
        ));
    }
    let mut img = LinearImage::filled(layout.width, layout.height, Tristimulus::BLACK)?;
    for spec in &layout.patches {
        spec.roi.check_bounds(layout.width, layout.height)?;
        let encoded = match report.error_of(&spec.label) {
            Some(e) if !report.is_excluded(&spec.label) => ramp_color(e / scale_max_degrees),
            _ => HEATMAP_EXCLUDED,
        };
        let fill = srgb_to_linear_xyz(encoded[0], encoded[1], encoded[2])?;
        for row in spec.roi.y0..spec.roi.y0 + spec.roi.height {
            for col in spec.roi.x0..spec.roi.x0 + spec.roi.width {
                img.set(col, row, fill);
            }
        }
    }
    Ok(img)
}
