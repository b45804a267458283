//! Side-by-side evaluation of the correction methods on one scene: the
//! uncorrected input, classic white balancing with each anchor alone, a
//! multi-color least-squares fit and spatially varying white balancing.

use std::fmt::Write as _;

use serde::Serialize;

use crate::balance::{
    correct_image_multicolor, correct_image_svwb, correct_image_wb, multicolor_matrix, WhitePointAnchor,
};
use crate::color::{AdaptationModel, ModelKind, Tristimulus};
use crate::error::Result;
use crate::estimation::region_mean;
use crate::image::LinearImage;
use crate::metrics::{evaluate_chart, ChartLayout, ErrorReport};
use crate::synth::{PatchKind, SyntheticScene};

#[derive(Debug, Clone, Serialize)]
pub struct MethodResult {
    pub method: String,
    pub mean: f64,
    pub std: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip)]
    pub report: ErrorReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct MultiColorSummary {
    pub colors: usize,
    pub condition_number: Option<f64>,
    pub deficient: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub model: ModelKind,
    pub methods: Vec<MethodResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multicolor: Option<MultiColorSummary>,
}

impl Comparison {
    pub fn get(&self, method: &str) -> Option<&MethodResult> {
        self.methods.iter().find(|m| m.method == method)
    }

    /// Corrected methods (everything but `input`), best mean first.
    pub fn ranking(&self) -> Vec<&str> {
        let mut rows: Vec<&MethodResult> = self.methods.iter().filter(|m| m.method != "input").collect();
        rows.sort_by(|a, b| a.mean.total_cmp(&b.mean));
        rows.into_iter().map(|m| m.method.as_str()).collect()
    }

    pub fn to_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("comparison serializes");
        v["ranking"] = serde_json::json!(self.ranking());
        serde_json::to_string_pretty(&v).expect("comparison serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "model {}", self.model).unwrap();
        writeln!(out, "{:<14} {:>10} {:>10}  note", "method", "mean", "std").unwrap();
        for m in &self.methods {
            writeln!(
                out,
                "{:<14} {:>10.4} {:>10.4}  {}",
                m.method,
                m.mean,
                m.std,
                m.note.as_deref().unwrap_or("")
            )
            .unwrap();
        }
        writeln!(out, "ranking {}", self.ranking().join(" < ")).unwrap();
        out
    }
}

fn row(method: &str, report: ErrorReport, note: Option<String>) -> MethodResult {
    MethodResult {
        method: method.to_string(),
        mean: report.mean,
        std: report.std,
        note,
        report,
    }
}

/// Run every method on `observed` and score it against `reference`.
/// `calibration` supplies the `(observed, reference)` color pairs for the
/// multi-color fit; with fewer than three pairs that method is skipped.
pub fn compare_images(
    observed: &LinearImage,
    reference: &LinearImage,
    layout: &ChartLayout,
    anchors: &[WhitePointAnchor],
    calibration: &[(Tristimulus, Tristimulus)],
    model: ModelKind,
) -> Result<Comparison> {
    let ma = AdaptationModel::new(model);
    let mut methods = vec![row("input", evaluate_chart(observed, reference, layout)?, None)];

    for (i, a) in anchors.iter().enumerate() {
        let out = correct_image_wb(observed, &ma, a.source, a.target)?;
        methods.push(row(
            &format!("wb-anchor{}", i + 1),
            evaluate_chart(&out, reference, layout)?,
            Some(format!("white at ({:.1}, {:.1})", a.coord.x, a.coord.y)),
        ));
    }

    let multicolor = if calibration.len() >= 3 {
        let (src, dst): (Vec<Tristimulus>, Vec<Tristimulus>) = calibration.iter().copied().unzip();
        let fit = multicolor_matrix(&src, &dst)?;
        let out = correct_image_multicolor(observed, &fit);
        let note = format!(
            "{} colors, cond {:.3e}{}",
            calibration.len(),
            fit.condition_number,
            if fit.deficient { ", RANK DEFICIENT" } else { "" }
        );
        methods.push(row("multicolor", evaluate_chart(&out, reference, layout)?, Some(note)));
        Some(MultiColorSummary {
            colors: calibration.len(),
            condition_number: fit.condition_number.is_finite().then_some(fit.condition_number),
            deficient: fit.deficient,
        })
    } else {
        None
    };

    let out = correct_image_svwb(observed, &ma, anchors)?;
    methods.push(row(
        "svwb",
        evaluate_chart(&out, reference, layout)?,
        Some(format!("{} anchors", anchors.len())),
    ));

    Ok(Comparison {
        model,
        methods,
        multicolor,
    })
}

/// Calibration pairs for the multi-color fit on a synthetic scene: region
/// means of every white and non-black neutral patch.
pub fn neutral_calibration(scene: &SyntheticScene) -> Result<Vec<(Tristimulus, Tristimulus)>> {
    scene
        .chart
        .patches
        .iter()
        .filter(|p| matches!(p.kind, PatchKind::White | PatchKind::Neutral))
        .map(|p| {
            Ok((
                region_mean(&scene.observed, &p.roi)?,
                region_mean(&scene.ground_truth, &p.roi)?,
            ))
        })
        .collect()
}

pub fn compare_scene(scene: &SyntheticScene, model: ModelKind) -> Result<Comparison> {
    compare_images(
        &scene.observed,
        &scene.ground_truth,
        &scene.layout,
        &scene.true_anchors,
        &neutral_calibration(scene)?,
        model,
    )
}
