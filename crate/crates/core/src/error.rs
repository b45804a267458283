use std::fmt;
use std::path::PathBuf;

/// Which side of a white-point pair a degenerate response came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhiteRole {
    Source,
    Target,
}

impl fmt::Display for WhiteRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WhiteRole::Source => "source",
            WhiteRole::Target => "target",
        })
    }
}

/// Coarse error category, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad configuration, arguments, geometry or layouts.
    Config,
    /// File system, decode and encode failures.
    Io,
    /// Degenerate numerics: non-positive cone responses, zero vectors, black estimates.
    Numeric,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("channel value {value} is outside [0, 1]")]
    InputRange { value: f64 },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("degenerate {role} white: cone component {component} is {value} (must be > 0)")]
    DegenerateWhite {
        role: WhiteRole,
        component: &'static str,
        value: f64,
    },

    #[error("at least one white-point anchor is required")]
    NoAnchors,

    #[error("anchors {first} and {second} share the coordinate ({x}, {y})")]
    DuplicateAnchor {
        first: usize,
        second: usize,
        x: f64,
        y: f64,
    },

    #[error("anchor {index} at ({x}, {y}) lies outside the {width}x{height} image")]
    AnchorOutOfBounds {
        index: usize,
        x: f64,
        y: f64,
        width: usize,
        height: usize,
    },

    #[error("multi-color fit needs at least 3 color pairs, got {0}")]
    Underdetermined(usize),

    #[error("{sources} source colors but {targets} target colors")]
    LengthMismatch { sources: usize, targets: usize },

    #[error("region {x0},{y0} {width}x{height} is empty or exceeds the {image_width}x{image_height} image")]
    RoiOutOfBounds {
        x0: usize,
        y0: usize,
        width: usize,
        height: usize,
        image_width: usize,
        image_height: usize,
    },

    #[error("white estimate is degenerate (luminance {0})")]
    DegenerateEstimate(f64),

    #[error("angular error is undefined for a zero-length vector")]
    UndefinedAngle,

    #[error("image shapes differ: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),

    #[error("no patch contributed to the error statistics")]
    NoValidPatches,

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("invalid chart layout: {0}")]
    InvalidLayout(String),

    #[error("invalid illuminant field: {0}")]
    InvalidField(String),

    #[error("invalid configuration at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("unsupported bit depth {0} (expected 8 or 16)")]
    UnsupportedBitDepth(u32),

    #[error("corrupt image stream: {0}")]
    CorruptStream(String),

    #[error("image encoding failed: {0}")]
    Encode(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            InputRange { .. }
            | NonFinite { .. }
            | DegenerateWhite { .. }
            | DegenerateEstimate(_)
            | UndefinedAngle
            | NoValidPatches => ErrorKind::Numeric,
            Io { .. } | UnsupportedFormat(_) | UnsupportedBitDepth(_) | CorruptStream(_)
            | Encode(_) => ErrorKind::Io,
            NoAnchors
            | DuplicateAnchor { .. }
            | AnchorOutOfBounds { .. }
            | Underdetermined(_)
            | LengthMismatch { .. }
            | RoiOutOfBounds { .. }
            | ShapeMismatch(..)
            | InvalidImage(_)
            | InvalidLayout(_)
            | InvalidField(_)
            | Config { .. } => ErrorKind::Config,
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
