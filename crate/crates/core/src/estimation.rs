//! Source-white estimation: region means and the Gray-World / Max-RGB
//! statistics. All estimators operate on linear XYZ and return a
//! `Y = 1`-normalized white.

use crate::color::Tristimulus;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::image::{LinearImage, RegionOfInterest};

fn sum_pixels(pixels: &[Tristimulus]) -> [f64; 3] {
    pixels.iter().fold([0.0; 3], |acc, p| [acc[0] + p.x, acc[1] + p.y, acc[2] + p.z])
}

/// Component-wise arithmetic mean of the pixels inside `roi`.
pub fn region_mean(img: &LinearImage, roi: &RegionOfInterest) -> Result<Tristimulus> {
    roi.check_bounds(img.width(), img.height())?;
    let mut acc = [0.0; 3];
    for row in roi.y0..roi.y0 + roi.height {
        let s = sum_pixels(&img.row(row)[roi.x0..roi.x0 + roi.width]);
        for c in 0..3 {
            acc[c] += s[c];
        }
    }
    let n = roi.area() as f64;
    Ok(Tristimulus::new(acc[0] / n, acc[1] / n, acc[2] / n))
}

pub fn estimate_gray_world(img: &LinearImage) -> Result<Tristimulus> {
    estimate_gray_world_with(img, Execution::default())
}

/// Global per-channel mean, normalized to `Y = 1`. Row sums are reduced in
/// row order, so the result does not depend on the execution mode.
pub fn estimate_gray_world_with(img: &LinearImage, execution: Execution) -> Result<Tristimulus> {
    let rows = exec::map_rows(img.height(), execution, |r| sum_pixels(img.row(r)));
    let total = rows.iter().fold([0.0; 3], |acc, s| [acc[0] + s[0], acc[1] + s[1], acc[2] + s[2]]);
    let n = img.pixels().len() as f64;
    Tristimulus::new(total[0] / n, total[1] / n, total[2] / n).normalized_to_unit_y()
}

/// How Max-RGB picks its per-channel statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaxRgb {
    /// The strict maximum.
    Strict,
    /// Nearest-rank percentile in `(0, 100]`; robust to isolated hot pixels.
    Percentile(f64),
}

impl Default for MaxRgb {
    fn default() -> Self {
        MaxRgb::Percentile(99.9)
    }
}

pub fn estimate_max_rgb(img: &LinearImage) -> Result<Tristimulus> {
    estimate_max_rgb_with(img, MaxRgb::default())
}

pub fn estimate_max_rgb_with(img: &LinearImage, mode: MaxRgb) -> Result<Tristimulus> {
    let px = img.pixels();
    let channel = |c: usize| -> Vec<f64> { px.iter().map(|p| p.to_array()[c]).collect() };
    let stat = match mode {
        MaxRgb::Strict => {
            let mut m = [f64::NEG_INFINITY; 3];
            for p in px {
                for (c, v) in p.to_array().into_iter().enumerate() {
                    m[c] = m[c].max(v);
                }
            }
            m
        }
        MaxRgb::Percentile(pct) => {
            if !(pct > 0.0 && pct <= 100.0) {
                return Err(Error::config("percentile", format!("must be in (0, 100], got {pct}")));
            }
            let n = px.len();
            let rank = ((pct / 100.0) * n as f64).ceil() as usize;
            let idx = rank.clamp(1, n) - 1;
            let mut m = [0.0; 3];
            for (c, slot) in m.iter_mut().enumerate() {
                let mut values = channel(c);
                let (_, v, _) = values.select_nth_unstable_by(idx, f64::total_cmp);
                *slot = *v;
            }
            m
        }
    };
    Tristimulus::from_array(stat).normalized_to_unit_y()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: Tristimulus, b: Tristimulus) {
        for (x, y) in a.to_array().iter().zip(b.to_array()) {
            assert!((x - y).abs() < 1e-14, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn region_mean_examples() {
        let img = LinearImage::from_fn(2, 1, |c, _| {
            let v = 0.2 * (c + 1) as f64;
            Tristimulus::new(v, v, v)
        })
        .unwrap();
        assert_eq!(region_mean(&img, &RegionOfInterest::new(1, 0, 1, 1)).unwrap(), img.get(1, 0));
        let m = region_mean(&img, &RegionOfInterest::new(0, 0, 2, 1)).unwrap();
        for v in m.to_array() {
            assert!((v - 0.3).abs() < 1e-15);
        }
        let c = Tristimulus::new(0.3, 0.25, 0.7);
        let flat = LinearImage::filled(5, 4, c).unwrap();
        assert_close(region_mean(&flat, &RegionOfInterest::new(1, 1, 3, 2)).unwrap(), c);
        assert!(matches!(
            region_mean(&flat, &RegionOfInterest::new(4, 0, 2, 1)),
            Err(Error::RoiOutOfBounds { .. })
        ));
    }

    #[test]
    fn gray_world_examples() {
        let c = Tristimulus::new(0.4, 0.5, 0.3);
        let e = estimate_gray_world(&LinearImage::filled(3, 3, c).unwrap()).unwrap();
        assert_close(e, Tristimulus::new(0.8, 1.0, 0.6));

        let img = LinearImage::from_fn(4, 1, |col, _| {
            if col % 2 == 0 {
                Tristimulus::new(1.0, 0.0, 0.0)
            } else {
                Tristimulus::new(0.0, 1.0, 0.0)
            }
        })
        .unwrap();
        // mean (0.5, 0.5, 0) -> Y-normalized (1, 1, 0)
        assert_eq!(estimate_gray_world(&img).unwrap(), Tristimulus::new(1.0, 1.0, 0.0));

        let black = LinearImage::filled(2, 2, Tristimulus::BLACK).unwrap();
        assert!(matches!(estimate_gray_world(&black), Err(Error::DegenerateEstimate(_))));
        assert!(matches!(estimate_max_rgb(&black), Err(Error::DegenerateEstimate(_))));
    }

    #[test]
    fn max_rgb_outlier_and_percentile() {
        let mut img = LinearImage::filled(10, 10, Tristimulus::new(0.2, 0.2, 0.2)).unwrap();
        img.set(3, 3, Tristimulus::new(0.9, 0.5, 0.1));
        // Strict max takes each channel's maximum independently.
        let strict = estimate_max_rgb_with(&img, MaxRgb::Strict).unwrap();
        assert_eq!(strict, Tristimulus::new(1.8, 1.0, 0.4));
        // 100 pixels: the 99.9th percentile is still the top rank.
        assert_eq!(estimate_max_rgb(&img).unwrap(), strict);
        // The 50th percentile ignores the single outlier.
        let median = estimate_max_rgb_with(&img, MaxRgb::Percentile(50.0)).unwrap();
        assert_eq!(median, Tristimulus::new(1.0, 1.0, 1.0));
        assert!(estimate_max_rgb_with(&img, MaxRgb::Percentile(0.0)).is_err());
    }
}
