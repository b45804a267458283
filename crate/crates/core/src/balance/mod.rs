//! Correction matrices and their application to images.
//!
//! Classic white balancing maps one source white to one target white through
//! `M_A^-1 * diag(target_cone / source_cone) * M_A`. Spatially varying white
//! balancing builds one such matrix per anchor and, for every pixel, blends
//! them with normalized inverse-distance weights taken in the image plane.

mod multicolor;

pub use multicolor::{
    condition_number, correct_image_multicolor, multicolor_matrix, multicolor_matrix_with_threshold,
    FitMethod, MultiColorFit, DEFAULT_DEFICIENCY_THRESHOLD,
};

use nalgebra::{Matrix3, Vector3};

use crate::color::{cone_response, AdaptationModel, Tristimulus};
use crate::error::{Error, Result, WhiteRole};
use crate::exec::{self, Execution};
use crate::image::{LinearImage, PixelCoord};

/// A 3x3 linear map on XYZ pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionMatrix(Matrix3<f64>);

impl CorrectionMatrix {
    pub fn identity() -> Self {
        CorrectionMatrix(Matrix3::identity())
    }

    pub fn from_matrix(m: Matrix3<f64>) -> Self {
        CorrectionMatrix(m)
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Self {
        CorrectionMatrix(crate::color::matrix_from_rows(&rows))
    }

    pub fn diagonal(d: [f64; 3]) -> Self {
        CorrectionMatrix(Matrix3::from_diagonal(&Vector3::from(d)))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        let m = &self.0;
        [
            [m[(0, 0)], m[(0, 1)], m[(0, 2)]],
            [m[(1, 0)], m[(1, 1)], m[(1, 2)]],
            [m[(2, 0)], m[(2, 1)], m[(2, 2)]],
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn apply(&self, p: Tristimulus) -> Tristimulus {
        let m = &self.0;
        Tristimulus::new(
            m[(0, 0)] * p.x + m[(0, 1)] * p.y + m[(0, 2)] * p.z,
            m[(1, 0)] * p.x + m[(1, 1)] * p.y + m[(1, 2)] * p.z,
            m[(2, 0)] * p.x + m[(2, 1)] * p.y + m[(2, 2)] * p.z,
        )
    }
}

/// Source white, target white and where in the image the source was observed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhitePointAnchor {
    pub source: Tristimulus,
    pub target: Tristimulus,
    pub coord: PixelCoord,
}

impl WhitePointAnchor {
    pub fn new(source: Tristimulus, target: Tristimulus, coord: PixelCoord) -> Self {
        WhitePointAnchor {
            source,
            target,
            coord,
        }
    }
}

/// Per-anchor blending weights; non-negative and summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Classic white-balance matrix mapping `source` onto `target`.
pub fn wb_matrix(
    model: &AdaptationModel,
    source: Tristimulus,
    target: Tristimulus,
) -> Result<CorrectionMatrix> {
    let s = cone_response(model, source);
    let d = cone_response(model, target);
    for (role, cone) in [(WhiteRole::Source, &s), (WhiteRole::Target, &d)] {
        if let Some((component, value)) = cone.first_nonpositive() {
            return Err(Error::DegenerateWhite {
                role,
                component,
                value,
            });
        }
    }
    let gain = Matrix3::from_diagonal(&Vector3::new(
        d.rho / s.rho,
        d.gamma / s.gamma,
        d.beta / s.beta,
    ));
    Ok(CorrectionMatrix(model.inverse() * gain * model.matrix()))
}

/// Matrix for a single anchor; the same construction as [`wb_matrix`].
pub fn per_anchor_matrix(
    model: &AdaptationModel,
    anchor: &WhitePointAnchor,
) -> Result<CorrectionMatrix> {
    wb_matrix(model, anchor.source, anchor.target)
}

pub(crate) fn validate_coords(coords: &[PixelCoord]) -> Result<()> {
    if coords.is_empty() {
        return Err(Error::NoAnchors);
    }
    for (i, a) in coords.iter().enumerate() {
        if !a.is_finite() {
            return Err(Error::NonFinite {
                what: "anchor coordinate",
            });
        }
        if let Some(j) = coords[..i].iter().position(|b| b == a) {
            return Err(Error::DuplicateAnchor {
                first: j,
                second: i,
                x: a.x,
                y: a.y,
            });
        }
    }
    Ok(())
}

/// Inverse-distance weights written into `out`. Coordinates must already be
/// validated. A coordinate that coincides with `p` takes the full weight.
pub(crate) fn fill_weights(p: PixelCoord, coords: &[PixelCoord], out: &mut [f64]) {
    debug_assert_eq!(coords.len(), out.len());
    for (m, c) in coords.iter().enumerate() {
        let inv = 1.0 / p.distance(*c);
        if !inv.is_finite() {
            out.fill(0.0);
            out[m] = 1.0;
            return;
        }
        out[m] = inv;
    }
    let total: f64 = out.iter().sum();
    for k in out.iter_mut() {
        *k /= total;
    }
}

/// Normalized inverse-distance weights of `p` against plain coordinates.
pub fn inverse_distance_weights(p: PixelCoord, coords: &[PixelCoord]) -> Result<WeightVector> {
    validate_coords(coords)?;
    if !p.is_finite() {
        return Err(Error::NonFinite {
            what: "pixel coordinate",
        });
    }
    let mut k = vec![0.0; coords.len()];
    fill_weights(p, coords, &mut k);
    Ok(WeightVector(k))
}

/// Blending weights of each anchor at pixel coordinate `p`.
pub fn weights(p: PixelCoord, anchors: &[WhitePointAnchor]) -> Result<WeightVector> {
    let coords: Vec<PixelCoord> = anchors.iter().map(|a| a.coord).collect();
    inverse_distance_weights(p, &coords)
}

fn blend(weights: &[f64], matrices: &[CorrectionMatrix]) -> CorrectionMatrix {
    let mut acc = Matrix3::zeros();
    for (&k, m) in weights.iter().zip(matrices) {
        acc += m.0 * k;
    }
    CorrectionMatrix(acc)
}

/// Spatially varying correction matrix at `p`: the weighted sum of the
/// per-anchor matrices.
pub fn svwb_matrix(
    p: PixelCoord,
    model: &AdaptationModel,
    anchors: &[WhitePointAnchor],
) -> Result<CorrectionMatrix> {
    let k = weights(p, anchors)?;
    let matrices = anchors
        .iter()
        .map(|a| per_anchor_matrix(model, a))
        .collect::<Result<Vec<_>>>()?;
    Ok(blend(k.as_slice(), &matrices))
}

pub fn correct_pixel(value: Tristimulus, matrix: &CorrectionMatrix) -> Tristimulus {
    matrix.apply(value)
}

/// Apply one matrix to every pixel.
pub fn apply_matrix(img: &LinearImage, matrix: &CorrectionMatrix, execution: Execution) -> LinearImage {
    let mut out = img.clone();
    exec::for_each_row(out.pixels_mut(), img.width(), execution, |_, row| {
        for px in row.iter_mut() {
            *px = matrix.apply(*px);
        }
    });
    out
}

pub fn correct_image_wb(
    img: &LinearImage,
    model: &AdaptationModel,
    source: Tristimulus,
    target: Tristimulus,
) -> Result<LinearImage> {
    correct_image_wb_with(img, model, source, target, Execution::default())
}

pub fn correct_image_wb_with(
    img: &LinearImage,
    model: &AdaptationModel,
    source: Tristimulus,
    target: Tristimulus,
    execution: Execution,
) -> Result<LinearImage> {
    let m = wb_matrix(model, source, target)?;
    Ok(apply_matrix(img, &m, execution))
}

/// Spatially varying white balancing with the per-anchor matrices computed
/// once up front.
#[derive(Debug, Clone)]
pub struct SpatialBalancer {
    coords: Vec<PixelCoord>,
    matrices: Vec<CorrectionMatrix>,
}

impl SpatialBalancer {
    pub fn new(model: &AdaptationModel, anchors: &[WhitePointAnchor]) -> Result<Self> {
        let coords: Vec<PixelCoord> = anchors.iter().map(|a| a.coord).collect();
        validate_coords(&coords)?;
        let matrices = anchors
            .iter()
            .map(|a| per_anchor_matrix(model, a))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpatialBalancer { coords, matrices })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn matrices(&self) -> &[CorrectionMatrix] {
        &self.matrices
    }

    pub fn matrix_at(&self, p: PixelCoord) -> CorrectionMatrix {
        let mut k = vec![0.0; self.coords.len()];
        fill_weights(p, &self.coords, &mut k);
        blend(&k, &self.matrices)
    }

    pub fn check_bounds(&self, width: usize, height: usize) -> Result<()> {
        for (index, c) in self.coords.iter().enumerate() {
            if !(c.x >= 0.0 && c.y >= 0.0 && c.x < width as f64 && c.y < height as f64) {
                return Err(Error::AnchorOutOfBounds {
                    index,
                    x: c.x,
                    y: c.y,
                    width,
                    height,
                });
            }
        }
        Ok(())
    }

    pub fn apply(&self, img: &LinearImage, execution: Execution) -> Result<LinearImage> {
        self.check_bounds(img.width(), img.height())?;
        let mut out = img.clone();
        let n = self.coords.len();
        exec::for_each_row(out.pixels_mut(), img.width(), execution, |row, pixels| {
            let mut k = vec![0.0; n];
            for (col, px) in pixels.iter_mut().enumerate() {
                fill_weights(PixelCoord::pixel_center(col, row), &self.coords, &mut k);
                *px = blend(&k, &self.matrices).apply(*px);
            }
        });
        Ok(out)
    }
}

pub fn correct_image_svwb(
    img: &LinearImage,
    model: &AdaptationModel,
    anchors: &[WhitePointAnchor],
) -> Result<LinearImage> {
    correct_image_svwb_with(img, model, anchors, Execution::default())
}

pub fn correct_image_svwb_with(
    img: &LinearImage,
    model: &AdaptationModel,
    anchors: &[WhitePointAnchor],
    execution: Execution,
) -> Result<LinearImage> {
    SpatialBalancer::new(model, anchors)?.apply(img, execution)
}
