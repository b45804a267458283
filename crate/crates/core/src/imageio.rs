//! Image and JSON document ingestion/egress.
//!
//! Images are 8/16-bit RGB PNG or binary PPM (P6). With [`Encoding::Srgb`]
//! channel values are sRGB-encoded and decoded through the sRGB curve; with
//! [`Encoding::Linear`] they already hold linear RGB. Either way they are
//! converted to XYZ with the D65 sRGB primaries.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use image::codecs::png::PngEncoder;
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageError};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::balance::{validate_coords, WhitePointAnchor};
use crate::color::{clamp_unit, linear_rgb_to_xyz, srgb_eotf, srgb_oetf, xyz_to_linear_rgb, ModelKind, Tristimulus};
use crate::error::{Error, Result};
use crate::estimation::region_mean;
use crate::image::{LinearImage, PixelCoord, RegionOfInterest};
use crate::metrics::ChartLayout;

const PNG_SIGNATURE: &[u8; 8] = b"\x89PNG\r\n\x1a\n";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Encoding {
    #[default]
    Srgb,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn from_bits(bits: u32) -> Result<Self> {
        match bits {
            8 => Ok(BitDepth::Eight),
            16 => Ok(BitDepth::Sixteen),
            other => Err(Error::UnsupportedBitDepth(other)),
        }
    }

    pub fn max_code(self) -> f64 {
        match self {
            BitDepth::Eight => 255.0,
            BitDepth::Sixteen => 65535.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Png,
    Ppm,
}

impl FileFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("png") => Ok(FileFormat::Png),
            Some("ppm") | Some("pnm") => Ok(FileFormat::Ppm),
            _ => Err(Error::UnsupportedFormat(format!(
                "cannot infer PNG or PPM from `{}`",
                path.display()
            ))),
        }
    }
}

fn sniff(bytes: &[u8]) -> Result<FileFormat> {
    if bytes.starts_with(PNG_SIGNATURE) {
        // IHDR is the first chunk; its bit depth byte sits at offset 24.
        let depth = *bytes
            .get(24)
            .ok_or_else(|| Error::CorruptStream("truncated PNG header".into()))?;
        if depth != 8 && depth != 16 {
            return Err(Error::UnsupportedBitDepth(depth as u32));
        }
        Ok(FileFormat::Png)
    } else if bytes.starts_with(b"P6") {
        Ok(FileFormat::Ppm)
    } else if bytes.len() >= 2 && bytes[0] == b'P' && bytes[1].is_ascii_digit() {
        Err(Error::UnsupportedFormat("only binary PPM (P6) is supported".into()))
    } else {
        Err(Error::UnsupportedFormat("not a PNG or PPM stream".into()))
    }
}

fn map_decode_error(e: ImageError) -> Error {
    match e {
        ImageError::Unsupported(u) => Error::UnsupportedFormat(u.to_string()),
        ImageError::IoError(io) => Error::CorruptStream(io.to_string()),
        other => Error::CorruptStream(other.to_string()),
    }
}

fn to_xyz(table: &[f64], r: usize, g: usize, b: usize) -> Tristimulus {
    linear_rgb_to_xyz([table[r], table[g], table[b]])
}

/// Decode value table: code -> linear channel value.
fn decode_table(max_code: usize, encoding: Encoding) -> Vec<f64> {
    let scale = max_code as f64;
    (0..=max_code)
        .map(|code| {
            let v = code as f64 / scale;
            match encoding {
                Encoding::Srgb => srgb_eotf(v),
                Encoding::Linear => v,
            }
        })
        .collect()
}

pub fn decode_image(bytes: &[u8], encoding: Encoding) -> Result<LinearImage> {
    let format = sniff(bytes)?;
    let fmt = match format {
        FileFormat::Png => image::ImageFormat::Png,
        FileFormat::Ppm => image::ImageFormat::Pnm,
    };
    let decoded = image::load_from_memory_with_format(bytes, fmt).map_err(map_decode_error)?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    let data: Vec<Tristimulus> = match decoded {
        DynamicImage::ImageLuma8(_)
        | DynamicImage::ImageLumaA8(_)
        | DynamicImage::ImageRgb8(_)
        | DynamicImage::ImageRgba8(_) => {
            let table = decode_table(255, encoding);
            decoded
                .to_rgb8()
                .pixels()
                .map(|p| to_xyz(&table, p[0] as usize, p[1] as usize, p[2] as usize))
                .collect()
        }
        DynamicImage::ImageLuma16(_)
        | DynamicImage::ImageLumaA16(_)
        | DynamicImage::ImageRgb16(_)
        | DynamicImage::ImageRgba16(_) => {
            let table = decode_table(65535, encoding);
            decoded
                .to_rgb16()
                .pixels()
                .map(|p| to_xyz(&table, p[0] as usize, p[1] as usize, p[2] as usize))
                .collect()
        }
        _ => return Err(Error::UnsupportedBitDepth(32)),
    };
    LinearImage::new(w, h, data)
}

pub fn load_image(path: impl AsRef<Path>, encoding: Encoding) -> Result<LinearImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode_image(&bytes, encoding)
}

/// Encoded bytes plus the number of pixels that needed gamut clamping.
#[derive(Debug, Clone)]
pub struct Encoded {
    pub bytes: Vec<u8>,
    pub clipped_pixels: usize,
}

pub fn encode_image(
    img: &LinearImage,
    format: FileFormat,
    depth: BitDepth,
    encoding: Encoding,
) -> Result<Encoded> {
    let max = depth.max_code();
    let mut clipped_pixels = 0;
    let mut codes: Vec<u16> = Vec::with_capacity(img.pixels().len() * 3);
    for p in img.pixels() {
        let e = clamp_unit(xyz_to_linear_rgb(*p));
        clipped_pixels += usize::from(e.clipped);
        for v in e.rgb {
            let v = match encoding {
                Encoding::Srgb => srgb_oetf(v),
                Encoding::Linear => v,
            };
            codes.push((v * max).round() as u16);
        }
    }
    let (w, h) = (img.width() as u32, img.height() as u32);
    let bytes = match format {
        FileFormat::Png => {
            let (raw, color): (Vec<u8>, ExtendedColorType) = match depth {
                BitDepth::Eight => (codes.iter().map(|&c| c as u8).collect(), ExtendedColorType::Rgb8),
                BitDepth::Sixteen => (
                    codes.iter().flat_map(|c| c.to_ne_bytes()).collect(),
                    ExtendedColorType::Rgb16,
                ),
            };
            let mut out = Cursor::new(Vec::new());
            PngEncoder::new(&mut out)
                .write_image(&raw, w, h, color)
                .map_err(|e| Error::Encode(e.to_string()))?;
            out.into_inner()
        }
        // Binary P6; 16-bit samples are big-endian.
        FileFormat::Ppm => {
            let mut out = format!("P6\n{w} {h}\n{}\n", max as u16).into_bytes();
            match depth {
                BitDepth::Eight => out.extend(codes.iter().map(|&c| c as u8)),
                BitDepth::Sixteen => out.extend(codes.iter().flat_map(|c| c.to_be_bytes())),
            }
            out
        }
    };
    Ok(Encoded {
        bytes,
        clipped_pixels,
    })
}

/// Write `img` as PNG or PPM (chosen by extension). Returns the number of
/// pixels that were clamped into the sRGB gamut.
pub fn save_image(
    img: &LinearImage,
    path: impl AsRef<Path>,
    depth: BitDepth,
    encoding: Encoding,
) -> Result<usize> {
    let path = path.as_ref();
    let encoded = encode_image(img, FileFormat::from_path(path)?, depth, encoding)?;
    fs::write(path, &encoded.bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(encoded.clipped_pixels)
}

/// Deserialize JSON, reporting failures with the path of the offending field.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::config(path, e.into_inner().to_string())
    })
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_json(&text)
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Encode(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_layout(path: impl AsRef<Path>) -> Result<ChartLayout> {
    let layout: ChartLayout = read_json(path)?;
    layout.validate()?;
    Ok(layout)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StandardWhite {
    #[serde(alias = "d65")]
    D65,
    #[serde(alias = "d50")]
    D50,
}

impl StandardWhite {
    pub fn xyz(self) -> Tristimulus {
        match self {
            StandardWhite::D65 => Tristimulus::d65(),
            StandardWhite::D50 => Tristimulus::d50(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum SourceSpec {
    Xyz([f64; 3]),
    Roi(RegionOfInterest),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetSpec {
    Xyz([f64; 3]),
    Standard(StandardWhite),
}

impl Default for TargetSpec {
    fn default() -> Self {
        TargetSpec::Standard(StandardWhite::D65)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoordKeyword {
    #[serde(rename = "roi-center")]
    RoiCenter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoordSpec {
    Point(PixelCoord),
    Keyword(CoordKeyword),
}

impl Default for CoordSpec {
    fn default() -> Self {
        CoordSpec::Keyword(CoordKeyword::RoiCenter)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorEntry {
    pub source: SourceSpec,
    #[serde(default)]
    pub target: TargetSpec,
    #[serde(default)]
    pub coord: CoordSpec,
}

/// JSON anchor document: optional adaptation model plus anchor entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelKind>,
    pub anchors: Vec<AnchorEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedAnchors {
    pub model: Option<ModelKind>,
    pub anchors: Vec<WhitePointAnchor>,
}

fn finite_xyz(v: [f64; 3], field: String) -> Result<Tristimulus> {
    Tristimulus::try_new(v[0], v[1], v[2]).map_err(|_| Error::config(field, "components must be finite"))
}

impl AnchorConfig {
    /// Explicit-XYZ config describing `anchors` exactly.
    pub fn from_anchors(model: Option<ModelKind>, anchors: &[WhitePointAnchor]) -> Self {
        AnchorConfig {
            model,
            anchors: anchors
                .iter()
                .map(|a| AnchorEntry {
                    source: SourceSpec::Xyz(a.source.to_array()),
                    target: TargetSpec::Xyz(a.target.to_array()),
                    coord: CoordSpec::Point(a.coord),
                })
                .collect(),
        }
    }

    /// Resolve region sources against `img` and validate coordinates.
    pub fn resolve(&self, img: &LinearImage) -> Result<ResolvedAnchors> {
        if self.anchors.is_empty() {
            return Err(Error::config("anchors", "at least one anchor is required"));
        }
        let mut anchors = Vec::with_capacity(self.anchors.len());
        for (i, entry) in self.anchors.iter().enumerate() {
            let source = match &entry.source {
                SourceSpec::Xyz(v) => finite_xyz(*v, format!("anchors[{i}].source.xyz"))?,
                SourceSpec::Roi(roi) => region_mean(img, roi)
                    .map_err(|e| Error::config(format!("anchors[{i}].source.roi"), e.to_string()))?,
            };
            let target = match &entry.target {
                TargetSpec::Xyz(v) => finite_xyz(*v, format!("anchors[{i}].target.xyz"))?,
                TargetSpec::Standard(w) => w.xyz(),
            };
            let coord = match (&entry.coord, &entry.source) {
                (CoordSpec::Point(p), _) => *p,
                (CoordSpec::Keyword(CoordKeyword::RoiCenter), SourceSpec::Roi(roi)) => roi.center(),
                (CoordSpec::Keyword(CoordKeyword::RoiCenter), SourceSpec::Xyz(_)) => {
                    return Err(Error::config(
                        format!("anchors[{i}].coord"),
                        "roi-center needs a roi source; give an explicit {\"x\", \"y\"} coordinate",
                    ))
                }
            };
            if !(coord.is_finite() && img.contains(coord)) {
                return Err(Error::config(
                    format!("anchors[{i}].coord"),
                    format!(
                        "({}, {}) is outside the {}x{} image",
                        coord.x,
                        coord.y,
                        img.width(),
                        img.height()
                    ),
                ));
            }
            anchors.push(WhitePointAnchor::new(source, target, coord));
        }
        let coords: Vec<PixelCoord> = anchors.iter().map(|a| a.coord).collect();
        if let Err(Error::DuplicateAnchor { second, x, y, .. }) = validate_coords(&coords) {
            return Err(Error::config(
                format!("anchors[{second}].coord"),
                format!("duplicate anchor coordinate ({x}, {y})"),
            ));
        }
        Ok(ResolvedAnchors {
            model: self.model,
            anchors,
        })
    }
}

pub fn parse_anchor_config(text: &str, img: &LinearImage) -> Result<ResolvedAnchors> {
    parse_json::<AnchorConfig>(text)?.resolve(img)
}

pub fn load_anchor_config(path: impl AsRef<Path>, img: &LinearImage) -> Result<ResolvedAnchors> {
    read_json::<AnchorConfig>(path)?.resolve(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::srgb_to_linear_xyz;

    fn solid_png(depth: BitDepth, code: u16) -> Vec<u8> {
        let mut out = Cursor::new(Vec::new());
        match depth {
            BitDepth::Eight => PngEncoder::new(&mut out)
                .write_image(&[code as u8; 12], 2, 2, ExtendedColorType::Rgb8)
                .unwrap(),
            BitDepth::Sixteen => {
                let raw: Vec<u8> = std::iter::repeat_n(code.to_ne_bytes(), 12).flatten().collect();
                PngEncoder::new(&mut out)
                    .write_image(&raw, 2, 2, ExtendedColorType::Rgb16)
                    .unwrap()
            }
        }
        out.into_inner()
    }

    #[test]
    fn white_png_is_d65() {
        let white = srgb_to_linear_xyz(1.0, 1.0, 1.0).unwrap();
        for depth in [BitDepth::Eight, BitDepth::Sixteen] {
            let code = depth.max_code() as u16;
            let img = decode_image(&solid_png(depth, code), Encoding::Srgb).unwrap();
            assert_eq!((img.width(), img.height()), (2, 2));
            for p in img.pixels() {
                assert!((p.x - white.x).abs() < 1e-12 && (p.y - white.y).abs() < 1e-12 && (p.z - white.z).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn black_ppm() {
        let bytes = b"P6\n1 1\n255\n\x00\x00\x00";
        let img = decode_image(bytes, Encoding::Srgb).unwrap();
        assert_eq!(img.pixels(), &[Tristimulus::BLACK]);
    }

    #[test]
    fn truncated_streams() {
        let png = solid_png(BitDepth::Eight, 200);
        assert!(matches!(decode_image(&png[..png.len() - 20], Encoding::Srgb), Err(Error::CorruptStream(_))));
        assert!(matches!(decode_image(b"P6\n4 4\n255\n\x00\x01", Encoding::Srgb), Err(Error::CorruptStream(_))));
        assert!(matches!(decode_image(&png[..20], Encoding::Srgb), Err(Error::CorruptStream(_))));
    }

    #[test]
    fn unsupported_inputs() {
        assert!(matches!(decode_image(b"GIF89a....", Encoding::Srgb), Err(Error::UnsupportedFormat(_))));
        assert!(matches!(decode_image(b"P3\n1 1\n255\n0 0 0\n", Encoding::Srgb), Err(Error::UnsupportedFormat(_))));
        let mut png = solid_png(BitDepth::Eight, 10);
        png[24] = 4;
        assert!(matches!(decode_image(&png, Encoding::Srgb), Err(Error::UnsupportedBitDepth(4))));
    }

    #[test]
    fn linear_encoding_skips_curve() {
        let bytes = b"P6\n1 1\n255\n\xff\xff\xff";
        let lin = decode_image(bytes, Encoding::Linear).unwrap();
        assert_eq!(lin.pixels()[0], linear_rgb_to_xyz([1.0, 1.0, 1.0]));
        let half = decode_image(b"P6\n1 1\n255\n\x80\x80\x80", Encoding::Linear).unwrap();
        let expected = linear_rgb_to_xyz([128.0 / 255.0; 3]);
        assert!((half.pixels()[0].y - expected.y).abs() < 1e-15);
    }

    #[test]
    fn anchor_config_errors_name_fields() {
        let img = LinearImage::filled(8, 8, Tristimulus::d65()).unwrap();
        let bad_kind = r#"{"anchors": [{"source": {"hsv": [1, 2, 3]}}]}"#;
        match parse_anchor_config(bad_kind, &img).unwrap_err() {
            Error::Config { field, .. } => assert_eq!(field, "anchors[0].source"),
            e => panic!("{e}"),
        }
        let no_coord = r#"{"anchors": [{"source": {"xyz": [1, 1, 1]}}]}"#;
        match parse_anchor_config(no_coord, &img).unwrap_err() {
            Error::Config { field, .. } => assert_eq!(field, "anchors[0].coord"),
            e => panic!("{e}"),
        }
        let outside = r#"{"anchors": [{"source": {"roi": {"x0": 6, "y0": 0, "width": 4, "height": 2}}}]}"#;
        match parse_anchor_config(outside, &img).unwrap_err() {
            Error::Config { field, .. } => assert_eq!(field, "anchors[0].source.roi"),
            e => panic!("{e}"),
        }
        let dup = r#"{"anchors": [
            {"source": {"xyz": [1, 1, 1]}, "coord": {"x": 2, "y": 2}},
            {"source": {"xyz": [1, 1, 0.5]}, "coord": {"x": 2, "y": 2}}]}"#;
        match parse_anchor_config(dup, &img).unwrap_err() {
            Error::Config { field, .. } => assert_eq!(field, "anchors[1].coord"),
            e => panic!("{e}"),
        }
        assert!(parse_anchor_config("{\"anchors\": []}", &img).is_err());
        assert!(parse_anchor_config("not json", &img).is_err());
    }
}
