//! Shared helpers for the integration tests, including a deliberately naive
//! per-pixel reference for spatially varying correction. It shares no code
//! with the library kernels: the model inverse is a cofactor expansion, and
//! corrected colors are accumulated per anchor instead of blending matrices.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;
use svwb_core::balance::WhitePointAnchor;
use svwb_core::color::{constants, ModelKind, Tristimulus};
use svwb_core::image::{LinearImage, PixelCoord};

pub type M3 = [[f64; 3]; 3];

pub fn model_rows(kind: ModelKind) -> M3 {
    match kind {
        ModelKind::XyzScaling => constants::XYZ_SCALING,
        ModelKind::VonKries => constants::VON_KRIES,
        ModelKind::Bradford => constants::BRADFORD,
    }
}

pub fn mat_vec(m: &M3, v: [f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|r| m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2])
}

pub fn mat_mul(a: &M3, b: &M3) -> M3 {
    let mut out = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r][c] = (0..3).map(|k| a[r][k] * b[k][c]).sum();
        }
    }
    out
}

pub fn inverse(m: &M3) -> M3 {
    let cof = |r: usize, c: usize| {
        let (r0, r1) = ((r + 1) % 3, (r + 2) % 3);
        let (c0, c1) = ((c + 1) % 3, (c + 2) % 3);
        m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
    };
    let det = m[0][0] * cof(0, 0) + m[0][1] * cof(0, 1) + m[0][2] * cof(0, 2);
    let mut out = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r][c] = cof(c, r) / det;
        }
    }
    out
}

pub fn naive_wb(kind: ModelKind, source: [f64; 3], target: [f64; 3]) -> M3 {
    let ma = model_rows(kind);
    let s = mat_vec(&ma, source);
    let d = mat_vec(&ma, target);
    let mut gain = [[0.0; 3]; 3];
    for i in 0..3 {
        gain[i][i] = d[i] / s[i];
    }
    mat_mul(&inverse(&ma), &mat_mul(&gain, &ma))
}

/// Per-pixel reference: distances, weights and per-anchor corrected colors,
/// all recomputed from scratch at every pixel.
pub fn naive_svwb(img: &LinearImage, kind: ModelKind, anchors: &[WhitePointAnchor]) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(img.pixels().len());
    for row in 0..img.height() {
        for col in 0..img.width() {
            let x = col as f64 + 0.5;
            let y = row as f64 + 0.5;
            let v = img.get(col, row).to_array();
            let dist: Vec<f64> = anchors
                .iter()
                .map(|a| ((x - a.coord.x).powi(2) + (y - a.coord.y).powi(2)).sqrt())
                .collect();
            let k: Vec<f64> = match dist.iter().position(|&d| d == 0.0) {
                Some(hit) => (0..anchors.len()).map(|m| if m == hit { 1.0 } else { 0.0 }).collect(),
                None => {
                    let total: f64 = dist.iter().map(|d| 1.0 / d).sum();
                    dist.iter().map(|d| (1.0 / d) / total).collect()
                }
            };
            let mut acc = [0.0; 3];
            for (a, km) in anchors.iter().zip(&k) {
                let m = naive_wb(kind, a.source.to_array(), a.target.to_array());
                let c = mat_vec(&m, v);
                for i in 0..3 {
                    acc[i] += km * c[i];
                }
            }
            out.push(acc);
        }
    }
    out
}

pub fn random_image(rng: &mut impl Rng, width: usize, height: usize) -> LinearImage {
    LinearImage::from_fn(width, height, |_, _| {
        Tristimulus::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))
    })
    .unwrap()
}

/// A near-neutral white with positive cone responses under every model.
pub fn random_white(rng: &mut impl Rng) -> Tristimulus {
    let d65 = Tristimulus::d65().to_array();
    let scale = rng.gen_range(0.1..10.0);
    Tristimulus::from_array([0, 1, 2].map(|c| d65[c] * rng.gen_range(0.6..1.4) * scale))
}

pub fn random_anchors(rng: &mut impl Rng, n: usize, width: usize, height: usize) -> Vec<WhitePointAnchor> {
    let mut anchors: Vec<WhitePointAnchor> = Vec::with_capacity(n);
    while anchors.len() < n {
        let coord = PixelCoord::new(rng.gen_range(0.0..width as f64), rng.gen_range(0.0..height as f64));
        if anchors.iter().any(|a| a.coord == coord) {
            continue;
        }
        anchors.push(WhitePointAnchor::new(random_white(rng), random_white(rng), coord));
    }
    anchors
}

pub fn max_abs_diff(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
}

pub fn relative_error(got: Tristimulus, want: Tristimulus) -> f64 {
    let g = got.to_array();
    let w = want.to_array();
    let diff = ((g[0] - w[0]).powi(2) + (g[1] - w[1]).powi(2) + (g[2] - w[2]).powi(2)).sqrt();
    diff / want.norm()
}
