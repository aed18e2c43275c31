use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::numerics::{bilinear_taps, ContinuousPoint, FeatureMap};
use crate::ops::{decode_regions, KernelGrid, OffsetField, PointOffsetField, RadConvParams};
use crate::region::{Region, RegionKernel};

/// Operator geometry with every offset instantiated.
#[derive(Debug, Clone, Copy)]
pub enum OperatorConfig<'a> {
    Conv {
        grid: &'a KernelGrid,
        stride: usize,
    },
    Dcn {
        grid: &'a KernelGrid,
        offsets: &'a PointOffsetField,
    },
    RadConv {
        params: &'a RadConvParams,
        offsets: &'a OffsetField,
    },
}

impl OperatorConfig<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorConfig::Conv { .. } => "conv",
            OperatorConfig::Dcn { .. } => "dcn",
            OperatorConfig::RadConv { .. } => "radconv",
        }
    }
}

/// Inclusive pixel bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundingBox {
    pub y_min: usize,
    pub x_min: usize,
    pub y_max: usize,
    pub x_max: usize,
}

/// Input pixels feeding one output position.
///
/// `weights` holds the summed geometric weight of each pixel (bilinear taps,
/// or tent weights divided by region area); kernel weights and modulation
/// are taken as nonzero. Pixels with zero analytic weight are never listed.
#[derive(Debug, Clone, PartialEq)]
pub struct FootprintReport {
    pub operator: &'static str,
    pub position: (usize, usize),
    pub weights: BTreeMap<(usize, usize), f64>,
    pub regions: Vec<Region>,
    pub points: Vec<ContinuousPoint>,
}

impl FootprintReport {
    pub fn count(&self) -> usize {
        self.weights.len()
    }

    pub fn contains(&self, y: usize, x: usize) -> bool {
        self.weights.contains_key(&(y, x))
    }

    pub fn pixels(&self) -> BTreeSet<(usize, usize)> {
        self.weights.keys().copied().collect()
    }

    pub fn bounding_box(&self) -> Option<BoundingBox> {
        let mut it = self.weights.keys();
        let &(y, x) = it.next()?;
        let mut b = BoundingBox {
            y_min: y,
            x_min: x,
            y_max: y,
            x_max: x,
        };
        for &(y, x) in it {
            b.y_min = b.y_min.min(y);
            b.y_max = b.y_max.max(y);
            b.x_min = b.x_min.min(x);
            b.x_max = b.x_max.max(x);
        }
        Some(b)
    }
}

/// Analytic footprint of output position `(oy, ox)` on an `height x width` input.
pub fn footprint(
    config: &OperatorConfig,
    height: usize,
    width: usize,
    oy: usize,
    ox: usize,
) -> Result<FootprintReport> {
    if height == 0 || width == 0 {
        return Err(Error::shape("empty input plane"));
    }
    let mut weights = BTreeMap::new();
    let mut regions = Vec::new();
    let mut points = Vec::new();
    match *config {
        OperatorConfig::Conv { grid, stride } => {
            if stride == 0 {
                return Err(Error::arg("stride must be positive"));
            }
            for off in grid.offsets() {
                let y = (oy * stride) as i64 + off.dy;
                let x = (ox * stride) as i64 + off.dx;
                if (0..height as i64).contains(&y) && (0..width as i64).contains(&x) {
                    *weights.entry((y as usize, x as usize)).or_insert(0.0) += 1.0;
                }
            }
        }
        OperatorConfig::Dcn { grid, offsets } => {
            let k = grid.len();
            let (c, fh, fw) = offsets.map().shape();
            if c == 0 || c % (2 * k) != 0 {
                return Err(Error::shape(format!(
                    "point offsets have {c} channels, need a multiple of 2K = {}",
                    2 * k
                )));
            }
            if oy >= fh || ox >= fw {
                return Err(Error::arg(format!(
                    "position ({oy}, {ox}) outside {fh}x{fw} offset field"
                )));
            }
            for g in 0..c / (2 * k) {
                for (kk, off) in grid.offsets().iter().enumerate() {
                    let ch = (g * k + kk) * 2;
                    let x = ox as f64 + off.dx as f64 + offsets.map().get(ch, oy, ox);
                    let y = oy as f64 + off.dy as f64 + offsets.map().get(ch + 1, oy, ox);
                    let p = ContinuousPoint::new(x, y)?;
                    points.push(p);
                    for (ty, tx, tw) in bilinear_taps(height, width, p.x, p.y) {
                        *weights.entry((ty, tx)).or_insert(0.0) += tw;
                    }
                }
            }
        }
        OperatorConfig::RadConv { params, offsets } => {
            for region in decode_regions(offsets, params, oy, ox)? {
                let kernel = RegionKernel::new(region, height, width);
                for (y, x, w) in kernel.pixel_weights() {
                    *weights.entry((y, x)).or_insert(0.0) += w;
                }
                regions.push(region);
            }
        }
    }
    Ok(FootprintReport {
        operator: config.name(),
        position: (oy, ox),
        weights,
        regions,
        points,
    })
}

/// Empirical footprint: the pixels whose unit perturbation (in every
/// channel at once) changes any output that `eval` reports.
pub fn probe_footprint<F>(channels: usize, height: usize, width: usize, eval: F) -> Result<BTreeSet<(usize, usize)>>
where
    F: Fn(&FeatureMap) -> Result<Vec<f64>>,
{
    let mut x = FeatureMap::zeros(channels, height, width);
    let base = eval(&x)?;
    let mut hit = BTreeSet::new();
    for y in 0..height {
        for xx in 0..width {
            for c in 0..channels {
                x.set(c, y, xx, 1.0);
            }
            if eval(&x)?.iter().zip(&base).any(|(a, b)| a != b) {
                hit.insert((y, xx));
            }
            for c in 0..channels {
                x.set(c, y, xx, 0.0);
            }
        }
    }
    Ok(hit)
}
