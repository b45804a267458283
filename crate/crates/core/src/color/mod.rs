//! Color representations, sRGB/XYZ conversion and chromatic adaptation bases.
//!
//! Everything here works in 64-bit floating point on linear light. The
//! adaptation models expose a basis change `M_A` into a cone-like response
//! space where an illuminant change is a per-channel scale.

pub mod constants;

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) fn matrix_from_rows(rows: &[[f64; 3]; 3]) -> Matrix3<f64> {
    Matrix3::new(
        rows[0][0], rows[0][1], rows[0][2], //
        rows[1][0], rows[1][1], rows[1][2], //
        rows[2][0], rows[2][1], rows[2][2],
    )
}

/// A CIE XYZ triple in linear light. Components are not clamped.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Tristimulus {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Tristimulus {
    pub const BLACK: Tristimulus = Tristimulus::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Tristimulus { x, y, z }
    }

    /// Like [`Tristimulus::new`] but rejects NaN and infinities.
    pub fn try_new(x: f64, y: f64, z: f64) -> Result<Self> {
        let t = Tristimulus::new(x, y, z);
        if t.is_finite() {
            Ok(t)
        } else {
            Err(Error::NonFinite { what: "tristimulus" })
        }
    }

    pub const fn from_array(a: [f64; 3]) -> Self {
        Tristimulus::new(a[0], a[1], a[2])
    }

    pub const fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Tristimulus::new(v[0], v[1], v[2])
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn scale(self, a: f64) -> Self {
        Tristimulus::new(self.x * a, self.y * a, self.z * a)
    }

    /// Component-wise product, i.e. a diagonal gain.
    pub fn gained(self, g: [f64; 3]) -> Self {
        Tristimulus::new(self.x * g[0], self.y * g[1], self.z * g[2])
    }

    pub fn dot(self, o: Tristimulus) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Rescale so that `Y == 1`. Fails when `Y` is not strictly positive.
    pub fn normalized_to_unit_y(self) -> Result<Self> {
        if self.y > 0.0 && self.y.is_finite() {
            Ok(self.scale(1.0 / self.y))
        } else {
            Err(Error::DegenerateEstimate(self.y))
        }
    }

    pub fn d65() -> Self {
        Tristimulus::from_array(constants::D65_WHITE)
    }

    pub fn d50() -> Self {
        Tristimulus::from_array(constants::D50_WHITE)
    }
}

/// Sharpened cone response `(rho, gamma, beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConeResponse {
    pub rho: f64,
    pub gamma: f64,
    pub beta: f64,
}

impl ConeResponse {
    pub fn to_array(self) -> [f64; 3] {
        [self.rho, self.gamma, self.beta]
    }

    /// First non-positive component, if any, as `(name, value)`.
    pub fn first_nonpositive(&self) -> Option<(&'static str, f64)> {
        [("rho", self.rho), ("gamma", self.gamma), ("beta", self.beta)]
            .into_iter()
            .find(|&(_, v)| !(v > 0.0 && v.is_finite()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    XyzScaling,
    VonKries,
    Bradford,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::XyzScaling, ModelKind::VonKries, ModelKind::Bradford];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::XyzScaling => "xyz-scaling",
            ModelKind::VonKries => "von-kries",
            ModelKind::Bradford => "bradford",
        }
    }

    fn rows(self) -> &'static [[f64; 3]; 3] {
        match self {
            ModelKind::XyzScaling => &constants::XYZ_SCALING,
            ModelKind::VonKries => &constants::VON_KRIES,
            ModelKind::Bradford => &constants::BRADFORD,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xyz-scaling" | "xyz" | "identity" => Ok(ModelKind::XyzScaling),
            "von-kries" | "vonkries" => Ok(ModelKind::VonKries),
            "bradford" => Ok(ModelKind::Bradford),
            other => Err(Error::config(
                "model",
                format!("unknown adaptation model `{other}` (expected xyz-scaling, von-kries or bradford)"),
            )),
        }
    }
}

/// Chromatic adaptation basis `M_A` together with its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptationModel {
    kind: ModelKind,
    matrix: Matrix3<f64>,
    inverse: Matrix3<f64>,
}

impl AdaptationModel {
    pub fn new(kind: ModelKind) -> Self {
        let matrix = matrix_from_rows(kind.rows());
        let inverse = match kind {
            ModelKind::XyzScaling => Matrix3::identity(),
            _ => matrix
                .try_inverse()
                .expect("adaptation constants are nonsingular"),
        };
        AdaptationModel {
            kind,
            matrix,
            inverse,
        }
    }

    pub fn xyz_scaling() -> Self {
        Self::new(ModelKind::XyzScaling)
    }

    pub fn von_kries() -> Self {
        Self::new(ModelKind::VonKries)
    }

    pub fn bradford() -> Self {
        Self::new(ModelKind::Bradford)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    pub fn inverse(&self) -> &Matrix3<f64> {
        &self.inverse
    }
}

impl From<ModelKind> for AdaptationModel {
    fn from(kind: ModelKind) -> Self {
        AdaptationModel::new(kind)
    }
}

/// Apply `M_A` to an XYZ triple.
pub fn cone_response(model: &AdaptationModel, c: Tristimulus) -> ConeResponse {
    let v = model.matrix * c.to_vector();
    ConeResponse {
        rho: v[0],
        gamma: v[1],
        beta: v[2],
    }
}

static SRGB_TO_XYZ: LazyLock<Matrix3<f64>> =
    LazyLock::new(|| matrix_from_rows(&constants::SRGB_TO_XYZ));

static XYZ_TO_SRGB: LazyLock<Matrix3<f64>> = LazyLock::new(|| {
    SRGB_TO_XYZ
        .try_inverse()
        .expect("sRGB primaries matrix is nonsingular")
});

/// sRGB decoding transfer function (encoded -> linear).
pub fn srgb_eotf(v: f64) -> f64 {
    if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

/// sRGB encoding transfer function (linear -> encoded).
pub fn srgb_oetf(v: f64) -> f64 {
    if v <= 0.0031308 {
        v * 12.92
    } else {
        1.055 * v.powf(1.0 / 2.4) - 0.055
    }
}

pub fn linear_rgb_to_xyz(rgb: [f64; 3]) -> Tristimulus {
    Tristimulus::from_vector(&(*SRGB_TO_XYZ * Vector3::from(rgb)))
}

pub fn xyz_to_linear_rgb(c: Tristimulus) -> [f64; 3] {
    let v = *XYZ_TO_SRGB * c.to_vector();
    [v[0], v[1], v[2]]
}

/// Decode sRGB-encoded channel values in `[0, 1]` to linear XYZ.
pub fn srgb_to_linear_xyz(r: f64, g: f64, b: f64) -> Result<Tristimulus> {
    for value in [r, g, b] {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InputRange { value });
        }
    }
    Ok(linear_rgb_to_xyz([srgb_eotf(r), srgb_eotf(g), srgb_eotf(b)]))
}

/// Encoded RGB plus whether any channel had to be clamped into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodedRgb {
    pub rgb: [f64; 3],
    pub clipped: bool,
}

/// Clamp a linear RGB triple into the unit cube, reporting whether it moved.
pub fn clamp_unit(rgb: [f64; 3]) -> EncodedRgb {
    let mut clipped = false;
    let rgb = rgb.map(|v| {
        // NaN is treated as out of gamut and maps to 0.
        let c = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
        // D65 maps to (1 + 1.5e-7, ...) through the rounded constants; such
        // excursions are not counted as clipping.
        clipped |= v.is_nan() || (c - v).abs() > 1e-6;
        c
    });
    EncodedRgb { rgb, clipped }
}

/// Linear XYZ to sRGB-encoded RGB. Out-of-gamut values are clamped.
pub fn linear_xyz_to_srgb(c: Tristimulus) -> EncodedRgb {
    let EncodedRgb { rgb, clipped } = clamp_unit(xyz_to_linear_rgb(c));
    EncodedRgb {
        rgb: rgb.map(srgb_oetf),
        clipped,
    }
}

fn write_matrix(out: &mut String, m: &[[f64; 3]; 3]) {
    out.push_str("| | c0 | c1 | c2 |\n|---|---:|---:|---:|\n");
    for (i, row) in m.iter().enumerate() {
        out.push_str(&format!("| r{i} | {} | {} | {} |\n", row[0], row[1], row[2]));
    }
}

/// Markdown reference page for the built-in matrices and white points.
pub fn reference_page() -> String {
    let mut out = String::from("# Color constants\n\n");
    out.push_str("Generated by `svwb constants`. Matrices are row-major and act on column vectors.\n\n");
    for kind in ModelKind::ALL {
        out.push_str(&format!("## Adaptation model `{}`\n\n", kind.name()));
        write_matrix(&mut out, kind.rows());
        out.push('\n');
    }
    out.push_str("## Linear sRGB to XYZ (D65)\n\n");
    write_matrix(&mut out, &constants::SRGB_TO_XYZ);
    out.push_str("\nThe XYZ to linear sRGB matrix is the numerical inverse of the above.\n\n");
    out.push_str("## White points (Y = 1)\n\n| name | X | Y | Z |\n|---|---:|---:|---:|\n");
    for (name, w) in [("D65", constants::D65_WHITE), ("D50", constants::D50_WHITE)] {
        out.push_str(&format!("| {name} | {} | {} | {} |\n", w[0], w[1], w[2]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xyz_scaling_is_exact_identity() {
        let m = AdaptationModel::xyz_scaling();
        assert_eq!(*m.matrix(), Matrix3::identity());
        assert_eq!(*m.inverse(), Matrix3::identity());
        let r = cone_response(&m, Tristimulus::new(0.5, 0.4, 0.3));
        assert_eq!(r.to_array(), [0.5, 0.4, 0.3]);
    }

    #[test]
    fn bradford_literals() {
        let m = AdaptationModel::bradford();
        let expected = [
            [0.8951, 0.2664, -0.1614],
            [-0.7502, 1.7135, 0.0367],
            [0.0389, -0.0685, 1.0296],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(m.matrix()[(i, j)], v);
            }
        }
    }

    #[test]
    fn models_invert() {
        for kind in ModelKind::ALL {
            let m = AdaptationModel::new(kind);
            let p = m.matrix() * m.inverse();
            for i in 0..3 {
                for j in 0..3 {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((p[(i, j)] - e).abs() < 1e-12, "{kind} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn bradford_d65_cone_response() {
        // Row-by-row products of the Bradford matrix with (0.9505, 1.0, 1.089),
        // evaluated by hand.
        let r = cone_response(&AdaptationModel::bradford(), Tristimulus::new(0.9505, 1.0, 1.089));
        let expected = [0.941_427_95, 1.040_401_20, 1.089_708_85];
        for (got, want) in r.to_array().iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        let zero = cone_response(&AdaptationModel::bradford(), Tristimulus::BLACK);
        assert_eq!(zero.to_array(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn srgb_endpoints() {
        assert_eq!(srgb_to_linear_xyz(0.0, 0.0, 0.0).unwrap(), Tristimulus::BLACK);
        let w = srgb_to_linear_xyz(1.0, 1.0, 1.0).unwrap();
        // Row sums of the sRGB to XYZ matrix.
        assert!((w.x - 0.9504700).abs() < 1e-12);
        assert!((w.y - 1.0000001).abs() < 1e-12);
        assert!((w.z - 1.0888300).abs() < 1e-12);
        let back = linear_xyz_to_srgb(Tristimulus::d65());
        for c in back.rgb {
            assert!((c - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn srgb_rejects_out_of_range() {
        assert!(matches!(
            srgb_to_linear_xyz(1.2, 0.0, 0.0),
            Err(Error::InputRange { .. })
        ));
        assert!(srgb_to_linear_xyz(0.0, -0.01, 0.0).is_err());
        assert!(srgb_to_linear_xyz(0.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn out_of_gamut_sets_clip_flag() {
        let e = linear_xyz_to_srgb(Tristimulus::new(2.0, 0.1, 0.0));
        assert!(e.clipped);
        assert!(e.rgb.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(!linear_xyz_to_srgb(Tristimulus::new(0.2, 0.2, 0.2)).clipped);
    }

    #[test]
    fn model_names_parse() {
        for kind in ModelKind::ALL {
            assert_eq!(kind.name().parse::<ModelKind>().unwrap(), kind);
        }
        assert!("cam16".parse::<ModelKind>().is_err());
    }
}
