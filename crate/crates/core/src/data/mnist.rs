//! MNIST digits and their 256-dimensional features.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::idx::{read_idx, IMAGES_MAGIC, LABELS_MAGIC};
use crate::encoding::FeatureVector;
use crate::error::{Error, Result};

pub const SIDE: usize = 28;
pub const PIXELS: usize = SIDE * SIDE;
/// Side of the downsampled image.
pub const OUT_SIDE: usize = 16;

/// One 28×28 grayscale digit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawImage {
    pixels: Vec<u8>,
    pub label: u8,
}

impl RawImage {
    pub fn new(pixels: Vec<u8>, label: u8) -> Result<Self> {
        if pixels.len() != PIXELS {
            return Err(Error::DimensionMismatch {
                expected: PIXELS,
                actual: pixels.len(),
            });
        }
        if label > 9 {
            return Err(Error::InvalidArgument(format!("digit label {label}")));
        }
        Ok(RawImage { pixels, label })
    }

    /// Row-major pixels.
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }
}

/// Reads paired image and label IDX files.
pub fn load_mnist(images_path: &Path, labels_path: &Path) -> Result<Vec<RawImage>> {
    let images = read_idx(images_path, IMAGES_MAGIC)?;
    let labels = read_idx(labels_path, LABELS_MAGIC)?;
    if images.dims[1..] != [SIDE, SIDE] {
        return Err(Error::Idx {
            path: images_path.to_path_buf(),
            reason: format!("images are {:?}, expected 28×28", &images.dims[1..]),
        });
    }
    if images.dims[0] != labels.dims[0] {
        return Err(Error::Idx {
            path: labels_path.to_path_buf(),
            reason: format!("{} labels for {} images", labels.dims[0], images.dims[0]),
        });
    }
    images
        .data
        .chunks_exact(PIXELS)
        .zip(&labels.data)
        .map(|(px, &l)| RawImage::new(px.to_vec(), l))
        .collect()
}

/// 28×28 → 16×16 reduction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Downsample {
    /// Each output pixel averages the 1.75×1.75 input area it covers.
    #[default]
    AreaAverage,
    /// 2×2 mean pool to 14×14, then a one-pixel zero border.
    PoolPad,
}

impl Downsample {
    pub fn tag(&self) -> &'static str {
        match self {
            Downsample::AreaAverage => "area-average",
            Downsample::PoolPad => "pool-pad",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s {
            "area-average" => Some(Downsample::AreaAverage),
            "pool-pad" => Some(Downsample::PoolPad),
            _ => None,
        }
    }
}

/// Overlap of input cell `i` with output cell `o` along one axis.
fn overlap(o: usize, i: usize) -> f64 {
    let scale = SIDE as f64 / OUT_SIDE as f64;
    let (lo, hi) = (o as f64 * scale, (o + 1) as f64 * scale);
    ((i + 1) as f64).min(hi) - (i as f64).max(lo)
}

/// 16×16 grayscale values in `[0, 1]`, row-major.
pub fn downsample(img: &RawImage, method: Downsample) -> Vec<f64> {
    let px = |r: usize, c: usize| img.pixels[r * SIDE + c] as f64 / 255.0;
    let mut out = vec![0.0; OUT_SIDE * OUT_SIDE];
    match method {
        Downsample::AreaAverage => {
            let scale = SIDE as f64 / OUT_SIDE as f64;
            let area = scale * scale;
            for orow in 0..OUT_SIDE {
                let rows = (orow * SIDE / OUT_SIDE)..((orow + 1) * SIDE).div_ceil(OUT_SIDE);
                for ocol in 0..OUT_SIDE {
                    let cols = (ocol * SIDE / OUT_SIDE)..((ocol + 1) * SIDE).div_ceil(OUT_SIDE);
                    let mut acc = 0.0;
                    for r in rows.clone() {
                        let wr = overlap(orow, r);
                        for c in cols.clone() {
                            acc += wr * overlap(ocol, c) * px(r, c);
                        }
                    }
                    out[orow * OUT_SIDE + ocol] = acc / area;
                }
            }
        }
        Downsample::PoolPad => {
            for r in 0..SIDE / 2 {
                for c in 0..SIDE / 2 {
                    let m = (px(2 * r, 2 * c) + px(2 * r + 1, 2 * c) + px(2 * r, 2 * c + 1) + px(2 * r + 1, 2 * c + 1)) / 4.0;
                    out[(r + 1) * OUT_SIDE + c + 1] = m;
                }
            }
        }
    }
    out
}

/// Downsampled, L2-normalized 256-dimensional features. All-zero images are
/// rejected.
pub fn mnist_to_features(img: &RawImage, method: Downsample) -> Result<FeatureVector> {
    FeatureVector::padded_normalized(&downsample(img, method), OUT_SIDE * OUT_SIDE, img.label as usize)
}
