//! Exact averages of the bilinear surface over axis-aligned rectangles and
//! their analytic gradients.
//!
//! The bilinear surface factors into a product of tents, so the double
//! integral over `[left, right] x [top, bottom]` is a sum over pixels of
//! `x(q) * T(q_x; left, right) * T(q_y; top, bottom)` where `T` is the
//! closed-form tent integral. Regions may leak past the map; padded samples
//! are zero and the average is still taken over the full geometric area.

use crate::error::{Error, Result};
#[cfg(test)]
use crate::numerics::tent_boundary_value;
use crate::numerics::{AxisWeights, FeatureMap};

/// Smallest extent a region may have along either axis unless overridden.
pub const DEFAULT_MIN_EXTENT: f64 = 1e-3;

/// Rectangle in continuous pixel coordinates, `top < bottom`, `left < right`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    top: f64,
    bottom: f64,
    left: f64,
    right: f64,
}

impl Region {
    /// Validates against [`DEFAULT_MIN_EXTENT`].
    pub fn new(top: f64, bottom: f64, left: f64, right: f64) -> Result<Self> {
        Self::with_min_extent(top, bottom, left, right, DEFAULT_MIN_EXTENT)
    }

    pub fn with_min_extent(top: f64, bottom: f64, left: f64, right: f64, min_extent: f64) -> Result<Self> {
        if ![top, bottom, left, right].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("region bounds"));
        }
        if !(min_extent > 0.0) {
            return Err(Error::arg("minimum region extent must be positive"));
        }
        if bottom - top < min_extent || right - left < min_extent {
            return Err(Error::arg(format!(
                "degenerate region [{top}, {bottom}] x [{left}, {right}] (min extent {min_extent})"
            )));
        }
        Ok(Self {
            top,
            bottom,
            left,
            right,
        })
    }

    /// Square of side `side` centred on `(x, y)`.
    pub fn centered(x: f64, y: f64, side: f64) -> Result<Self> {
        let h = 0.5 * side;
        Self::with_min_extent(y - h, y + h, x - h, x + h, side.min(DEFAULT_MIN_EXTENT) * (1.0 - 1e-9))
    }

    pub fn top(&self) -> f64 {
        self.top
    }
    pub fn bottom(&self) -> f64 {
        self.bottom
    }
    pub fn left(&self) -> f64 {
        self.left
    }
    pub fn right(&self) -> f64 {
        self.right
    }
    pub fn width(&self) -> f64 {
        self.right - self.left
    }
    pub fn height(&self) -> f64 {
        self.bottom - self.top
    }
    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Shift by `(dx, dy)` pixels.
    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self {
            top: self.top + dy,
            bottom: self.bottom + dy,
            left: self.left + dx,
            right: self.right + dx,
        }
    }
}

/// Partial derivatives of a region average with respect to its boundaries.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RegionGradient {
    pub d_top: f64,
    pub d_bottom: f64,
    pub d_left: f64,
    pub d_right: f64,
}

impl RegionGradient {
    fn scaled(self, s: f64) -> Self {
        Self {
            d_top: self.d_top * s,
            d_bottom: self.d_bottom * s,
            d_left: self.d_left * s,
            d_right: self.d_right * s,
        }
    }

    pub(crate) fn accumulate(&mut self, other: &RegionGradient) {
        self.d_top += other.d_top;
        self.d_bottom += other.d_bottom;
        self.d_left += other.d_left;
        self.d_right += other.d_right;
    }
}

/// Per-pixel weight of an input sample in a region average, `(y, x, weight)`.
pub type PixelGrad = (usize, usize, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct RegionBackward {
    /// Nonzero only for in-domain pixels within one unit of the region.
    pub input_grads: Vec<PixelGrad>,
    pub bound_grads: RegionGradient,
}

/// Separable tent weights of one region, shared across channels.
#[derive(Debug, Clone)]
pub(crate) struct RegionKernel {
    pub region: Region,
    pub cols: AxisWeights,
    pub rows: AxisWeights,
    pub inv_area: f64,
}

/// Unnormalised integral and boundary-line integrals of one plane.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct PlaneMoments {
    pub integral: f64,
    pub line_top: f64,
    pub line_bottom: f64,
    pub line_left: f64,
    pub line_right: f64,
}

impl RegionKernel {
    pub fn new(region: Region, height: usize, width: usize) -> Self {
        Self {
            cols: AxisWeights::new(region.left, region.right, width),
            rows: AxisWeights::new(region.top, region.bottom, height),
            inv_area: 1.0 / region.area(),
            region,
        }
    }

    /// Row-major plane of a `width`-wide map.
    pub fn average(&self, plane: &[f64], width: usize) -> f64 {
        let mut acc = 0.0;
        for (j, wy) in self.rows.weights().iter().enumerate() {
            let row = &plane[(self.rows.start + j) * width..];
            let row = &row[self.cols.start..self.cols.end()];
            let s: f64 = row.iter().zip(self.cols.weights()).map(|(v, wx)| v * wx).sum();
            acc += wy * s;
        }
        acc * self.inv_area
    }

    pub fn moments(&self, plane: &[f64], width: usize) -> PlaneMoments {
        let gl = self.cols.boundary_values(self.region.left);
        let gr = self.cols.boundary_values(self.region.right);
        let gt = self.rows.boundary_values(self.region.top);
        let gb = self.rows.boundary_values(self.region.bottom);
        let mut m = PlaneMoments::default();
        for (j, wy) in self.rows.weights().iter().enumerate() {
            let row = &plane[(self.rows.start + j) * width..];
            let row = &row[self.cols.start..self.cols.end()];
            let (mut s, mut sl, mut sr) = (0.0, 0.0, 0.0);
            for (i, v) in row.iter().enumerate() {
                s += v * self.cols.weights()[i];
                sl += v * gl[i];
                sr += v * gr[i];
            }
            m.integral += wy * s;
            m.line_left += wy * sl;
            m.line_right += wy * sr;
            m.line_top += gt[j] * s;
            m.line_bottom += gb[j] * s;
        }
        m
    }

    /// Boundary gradients of the average given the plane's moments.
    pub fn bound_grads(&self, m: &PlaneMoments) -> RegionGradient {
        let r = &self.region;
        let avg = m.integral * self.inv_area;
        let (w, h) = (r.width(), r.height());
        RegionGradient {
            d_left: avg / w - m.line_left * self.inv_area,
            d_right: m.line_right * self.inv_area - avg / w,
            d_top: avg / h - m.line_top * self.inv_area,
            d_bottom: m.line_bottom * self.inv_area - avg / h,
        }
    }

    /// Adds `scale * weight(q)` into a row-major plane gradient.
    pub fn scatter(&self, grad_plane: &mut [f64], width: usize, scale: f64) {
        let s = scale * self.inv_area;
        for (j, wy) in self.rows.weights().iter().enumerate() {
            let row = &mut grad_plane[(self.rows.start + j) * width..];
            let row = &mut row[self.cols.start..self.cols.end()];
            let sy = s * wy;
            for (g, wx) in row.iter_mut().zip(self.cols.weights()) {
                *g += sy * wx;
            }
        }
    }

    /// `(y, x, weight)` for every touched in-domain pixel.
    pub fn pixel_weights(&self) -> impl Iterator<Item = PixelGrad> + '_ {
        self.rows.weights().iter().enumerate().flat_map(move |(j, wy)| {
            self.cols
                .weights()
                .iter()
                .enumerate()
                .map(move |(i, wx)| (self.rows.start + j, self.cols.start + i, wy * wx * self.inv_area))
        })
    }
}

/// Exact mean of the bilinear surface of `channel` over `region`.
pub fn region_average(map: &FeatureMap, channel: usize, region: &Region) -> Result<f64> {
    map.check_channel(channel)?;
    let k = RegionKernel::new(*region, map.height(), map.width());
    Ok(k.average(map.plane(channel), map.width()))
}

/// Gradients of `upstream * region_average` with respect to the samples and
/// the four boundaries.
pub fn region_average_backward(
    map: &FeatureMap,
    channel: usize,
    region: &Region,
    upstream: f64,
) -> Result<RegionBackward> {
    map.check_channel(channel)?;
    let k = RegionKernel::new(*region, map.height(), map.width());
    let moments = k.moments(map.plane(channel), map.width());
    Ok(RegionBackward {
        input_grads: k.pixel_weights().map(|(y, x, w)| (y, x, upstream * w)).collect(),
        bound_grads: k.bound_grads(&moments).scaled(upstream),
    })
}

/// Midpoint-rule estimate of the region average on an `n x n` grid.
///
/// Samples the bilinear surface pointwise; shares nothing with the closed
/// form beyond the sampling rule itself. Each sample row is first
/// interpolated vertically into a zero-padded line, so a sample costs one
/// horizontal lerp.
pub fn quadrature_oracle(map: &FeatureMap, channel: usize, region: &Region, n: usize) -> Result<f64> {
    map.check_channel(channel)?;
    if n == 0 {
        return Err(Error::arg("quadrature needs at least one subdivision"));
    }
    let (h, w) = (map.height() as i64, map.width() as i64);
    let hx = region.width() / n as f64;
    let hy = region.height() / n as f64;
    // Column taps shared by every row: index into `line` and the upper weight.
    let taps: Vec<Option<(usize, f64)>> = (0..n)
        .map(|i| {
            let x = region.left + (i as f64 + 0.5) * hx;
            if x <= -1.0 || x >= w as f64 {
                return None;
            }
            let x0 = x.floor();
            Some(((x0 as i64 + 1) as usize, x - x0))
        })
        .collect();
    // line[q + 1] holds the surface at column q for q in -1..=w.
    let mut line = vec![0.0; w as usize + 2];
    let mut acc = 0.0;
    for j in 0..n {
        let y = region.top + (j as f64 + 0.5) * hy;
        if y <= -1.0 || y >= h as f64 {
            continue;
        }
        let y0 = y.floor();
        let fy = y - y0;
        let yi = y0 as i64;
        for q in 0..w {
            let a = map.get_padded(channel, yi, q);
            let b = map.get_padded(channel, yi + 1, q);
            line[q as usize + 1] = if fy == 0.0 { a } else { (1.0 - fy) * a + fy * b };
        }
        let mut row = 0.0;
        for &(xi, fx) in taps.iter().flatten() {
            row += if fx == 0.0 {
                line[xi]
            } else {
                (1.0 - fx) * line[xi] + fx * line[xi + 1]
            };
        }
        acc += row;
    }
    Ok(acc / (n * n) as f64)
}

/// Integral of the surface along a vertical line, by point evaluation of
/// the tent basis; used to cross-check the closed-form line terms.
#[cfg(test)]
fn vertical_line_integral(map: &FeatureMap, channel: usize, x: f64, top: f64, bottom: f64) -> f64 {
    let rows = AxisWeights::new(top, bottom, map.height());
    let mut acc = 0.0;
    for (j, wy) in rows.weights().iter().enumerate() {
        for qx in 0..map.width() {
            acc += map.get(channel, rows.start + j, qx) * tent_boundary_value(qx as i64, x) * wy;
        }
    }
    acc
}
