//! Raster and geometry carriers.

use serde::{Deserialize, Serialize};

use crate::color::Tristimulus;
use crate::error::{Error, Result};

/// Row-major raster of linear XYZ pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearImage {
    width: usize,
    height: usize,
    data: Vec<Tristimulus>,
}

impl LinearImage {
    pub fn new(width: usize, height: usize, data: Vec<Tristimulus>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width.checked_mul(height).ok_or_else(|| {
            Error::InvalidImage(format!("dimensions {width}x{height} overflow"))
        })?;
        if data.len() != expected {
            return Err(Error::InvalidImage(format!(
                "{width}x{height} image needs {expected} pixels, got {}",
                data.len()
            )));
        }
        Ok(LinearImage {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: Tristimulus) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> Tristimulus,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width.saturating_mul(height));
        for row in 0..height {
            for col in 0..width {
                data.push(f(col, row));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Tristimulus] {
        &self.data
    }

    pub fn pixels_mut(&mut self) -> &mut [Tristimulus] {
        &mut self.data
    }

    pub fn into_pixels(self) -> Vec<Tristimulus> {
        self.data
    }

    pub fn get(&self, col: usize, row: usize) -> Tristimulus {
        self.data[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, value: Tristimulus) {
        self.data[row * self.width + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Tristimulus] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    pub fn same_shape(&self, other: &LinearImage) -> Result<()> {
        if self.width == other.width && self.height == other.height {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ))
        }
    }

    pub fn map(&self, f: impl Fn(Tristimulus) -> Tristimulus) -> LinearImage {
        LinearImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&p| f(p)).collect(),
        }
    }

    pub fn contains(&self, p: PixelCoord) -> bool {
        p.x >= 0.0 && p.y >= 0.0 && p.x < self.width as f64 && p.y < self.height as f64
    }
}

/// Continuous image-plane coordinate in pixel units. Pixel `(col, row)` has
/// its center at `(col + 0.5, row + 0.5)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PixelCoord {
    pub x: f64,
    pub y: f64,
}

impl PixelCoord {
    pub const fn new(x: f64, y: f64) -> Self {
        PixelCoord { x, y }
    }

    pub fn pixel_center(col: usize, row: usize) -> Self {
        PixelCoord::new(col as f64 + 0.5, row as f64 + 0.5)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(self, other: PixelCoord) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Axis-aligned pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegionOfInterest {
    pub x0: usize,
    pub y0: usize,
    pub width: usize,
    pub height: usize,
}

impl RegionOfInterest {
    pub const fn new(x0: usize, y0: usize, width: usize, height: usize) -> Self {
        RegionOfInterest {
            x0,
            y0,
            width,
            height,
        }
    }

    pub fn check_bounds(&self, image_width: usize, image_height: usize) -> Result<()> {
        let fits = |start: usize, len: usize, limit: usize| {
            len >= 1 && start.checked_add(len).is_some_and(|end| end <= limit)
        };
        if fits(self.x0, self.width, image_width) && fits(self.y0, self.height, image_height) {
            Ok(())
        } else {
            Err(Error::RoiOutOfBounds {
                x0: self.x0,
                y0: self.y0,
                width: self.width,
                height: self.height,
                image_width,
                image_height,
            })
        }
    }

    pub fn center(&self) -> PixelCoord {
        PixelCoord::new(
            self.x0 as f64 + self.width as f64 / 2.0,
            self.y0 as f64 + self.height as f64 / 2.0,
        )
    }

    pub fn contains(&self, p: PixelCoord) -> bool {
        p.x >= self.x0 as f64
            && p.y >= self.y0 as f64
            && p.x < (self.x0 + self.width) as f64
            && p.y < (self.y0 + self.height) as f64
    }

    pub fn overlaps(&self, other: &RegionOfInterest) -> bool {
        self.x0 < other.x0 + other.width
            && other.x0 < self.x0 + self.width
            && self.y0 < other.y0 + other.height
            && other.y0 < self.y0 + self.height
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }
}
