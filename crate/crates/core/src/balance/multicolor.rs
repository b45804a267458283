//! Single-matrix multi-color balancing by least squares.
//!
//! The fit minimizes `sum ||M s_i - g_i||^2`. When the source colors are close
//! to linearly dependent (several near-gray whites, for example) the 3xN
//! source matrix loses rank; the fit is then flagged deficient and solved with
//! a truncated pseudo-inverse, which yields the minimum-norm solution.

use nalgebra::{DMatrix, Matrix3};
use serde::Serialize;

use super::{apply_matrix, CorrectionMatrix};
use crate::color::Tristimulus;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::image::LinearImage;

pub const DEFAULT_DEFICIENCY_THRESHOLD: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMethod {
    NormalEquations,
    PseudoInverse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiColorFit {
    pub matrix: CorrectionMatrix,
    /// Ratio of largest to smallest singular value of the 3xN source matrix;
    /// infinite when the smallest is exactly zero.
    pub condition_number: f64,
    pub deficient: bool,
    pub method: FitMethod,
}

fn column_matrix(colors: &[Tristimulus]) -> DMatrix<f64> {
    DMatrix::from_fn(3, colors.len(), |r, c| colors[c].to_array()[r])
}

fn check_inputs(sources: &[Tristimulus], targets: &[Tristimulus]) -> Result<()> {
    if sources.len() != targets.len() {
        return Err(Error::LengthMismatch {
            sources: sources.len(),
            targets: targets.len(),
        });
    }
    if sources.len() < 3 {
        return Err(Error::Underdetermined(sources.len()));
    }
    if !sources.iter().chain(targets).all(Tristimulus::is_finite) {
        return Err(Error::NonFinite {
            what: "multi-color calibration color",
        });
    }
    Ok(())
}

fn condition_of(singular: &[f64]) -> f64 {
    let max = singular.iter().copied().fold(0.0_f64, f64::max);
    let min = singular.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 || min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Condition number of the 3xN matrix whose columns are `sources`.
pub fn condition_number(sources: &[Tristimulus]) -> f64 {
    if sources.len() < 3 {
        return f64::INFINITY;
    }
    let svd = column_matrix(sources).svd(false, false);
    condition_of(svd.singular_values.as_slice())
}

pub fn multicolor_matrix(sources: &[Tristimulus], targets: &[Tristimulus]) -> Result<MultiColorFit> {
    multicolor_matrix_with_threshold(sources, targets, DEFAULT_DEFICIENCY_THRESHOLD)
}

pub fn multicolor_matrix_with_threshold(
    sources: &[Tristimulus],
    targets: &[Tristimulus],
    threshold: f64,
) -> Result<MultiColorFit> {
    check_inputs(sources, targets)?;
    if !(threshold.is_finite() && threshold >= 1.0) {
        return Err(Error::config(
            "deficiency_threshold",
            format!("must be a finite number >= 1, got {threshold}"),
        ));
    }
    let s = column_matrix(sources);
    let g = column_matrix(targets);
    let svd = s.clone().svd(true, true);
    let condition_number = condition_of(svd.singular_values.as_slice());
    let deficient = condition_number > threshold;

    if !deficient {
        // M S S^T = G S^T, solved as (S S^T) M^T = S G^T.
        let sst: Matrix3<f64> = (&s * s.transpose()).fixed_view::<3, 3>(0, 0).into_owned();
        let sgt: Matrix3<f64> = (&s * g.transpose()).fixed_view::<3, 3>(0, 0).into_owned();
        if let Some(chol) = sst.cholesky() {
            let mt = chol.solve(&sgt);
            let m = mt.transpose();
            if m.iter().all(|v| v.is_finite()) {
                return Ok(MultiColorFit {
                    matrix: CorrectionMatrix::from_matrix(m),
                    condition_number,
                    deficient,
                    method: FitMethod::NormalEquations,
                });
            }
        }
    }

    let sigma_max = svd.singular_values.iter().copied().fold(0.0_f64, f64::max);
    let pinv = svd
        .pseudo_inverse(sigma_max / threshold)
        .map_err(|e| Error::config("deficiency_threshold", e))?;
    let m = &g * pinv;
    Ok(MultiColorFit {
        matrix: CorrectionMatrix::from_matrix(m.fixed_view::<3, 3>(0, 0).into_owned()),
        condition_number,
        deficient,
        method: FitMethod::PseudoInverse,
    })
}

/// Apply a fitted matrix to every pixel, deficient or not.
pub fn correct_image_multicolor(img: &LinearImage, fit: &MultiColorFit) -> LinearImage {
    apply_matrix(img, &fit.matrix, Execution::default())
}
