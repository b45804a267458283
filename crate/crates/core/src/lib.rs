//! Spatially varying white balancing for scenes lit by mixed or
//! non-uniform illuminants.
//!
//! Each white-point anchor (a source white observed at some image
//! coordinate, and the white it should map to) yields a diagonal correction
//! in the cone space of an adaptation model. Every pixel is corrected by the
//! inverse-distance-weighted sum of those matrices. Classic white balancing
//! and a least-squares multi-color fit are provided as baselines, together
//! with the reproduction angular error used to score them on color charts.
//!
//! ```
//! use svwb_core::{balance, color::{AdaptationModel, Tristimulus}, image::PixelCoord};
//!
//! let model = AdaptationModel::bradford();
//! let anchors = [
//!     balance::WhitePointAnchor::new(Tristimulus::new(1.05, 1.0, 0.7), Tristimulus::d65(), PixelCoord::new(10.0, 10.0)),
//!     balance::WhitePointAnchor::new(Tristimulus::new(0.8, 1.0, 1.3), Tristimulus::d65(), PixelCoord::new(90.0, 10.0)),
//! ];
//! let m = balance::svwb_matrix(PixelCoord::new(10.0, 10.0), &model, &anchors).unwrap();
//! let white = m.apply(anchors[0].source);
//! assert!((white.y - 1.0).abs() < 1e-9);
//! ```

pub mod balance;
pub mod color;
pub mod compare;
pub mod error;
pub mod estimation;
pub mod exec;
pub mod image;
pub mod imageio;
pub mod metrics;
pub mod synth;

pub use error::{Error, ErrorKind, Result};
pub use exec::Execution;
