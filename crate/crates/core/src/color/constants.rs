//! Numeric constants shared by the color pipeline.
//!
//! Matrices are row-major `[[f64; 3]; 3]` and act on column vectors.

/// Bradford cone-response matrix.
pub const BRADFORD: [[f64; 3]; 3] = [
    [0.8951, 0.2664, -0.1614],
    [-0.7502, 1.7135, 0.0367],
    [0.0389, -0.0685, 1.0296],
];

/// von Kries (Hunt-Pointer-Estevez, normalized to D65) cone-response matrix.
pub const VON_KRIES: [[f64; 3]; 3] = [
    [0.40024, 0.70760, -0.08081],
    [-0.22630, 1.16532, 0.04570],
    [0.0, 0.0, 0.91822],
];

/// XYZ scaling: adaptation performed directly on tristimulus values.
pub const XYZ_SCALING: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// Linear sRGB (D65) to CIE XYZ.
pub const SRGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

/// CIE standard illuminant D65 white, Y = 1.
pub const D65_WHITE: [f64; 3] = [0.95047, 1.0, 1.08883];

/// CIE standard illuminant D50 white, Y = 1.
pub const D50_WHITE: [f64; 3] = [0.96422, 1.0, 0.82521];
