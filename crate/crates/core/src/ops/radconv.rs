//! RAD-Conv: every kernel element integrates the input over its own
//! rectangle, decoded FCOS-style from four positive distances to the
//! element's centre.
//!
//! ```text
//! y[g,o](p0) = sum_k m[g,k] * sum_i w_g[o][i] * avg( x[g,i], R[g,k](p0) )
//! R[g,k](p0) = [cy - dt, cy + db] x [cx - dl, cx + dr],   (cx, cy) = stride*p0 + p_k
//! ```
//!
//! The distances are `transform(raw)`. A region thinner than `epsilon_min`
//! along an axis is widened symmetrically about its midpoint to exactly
//! `epsilon_min`, which the backward pass differentiates through.

use rayon::prelude::*;

use super::{GroupWeights, ModulationField, OffsetField, OffsetTransform, RadConvParams};
use crate::error::{Error, Result};
use crate::numerics::FeatureMap;
use crate::region::{Region, RegionGradient, RegionKernel};

/// Output rows per backward work unit. Partial input gradients are summed
/// in block order, so results do not depend on the thread count.
const BACKWARD_ROW_BLOCK: usize = 4;

/// Top, bottom, left, right.
const SIDES: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct RadConvGrads {
    pub grad_x: FeatureMap,
    pub grad_w: GroupWeights,
    pub grad_offsets: OffsetField,
    pub grad_modulation: ModulationField,
}

/// Deliberate backward defects for negative-control gradient checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub(crate) enum GradientFault {
    #[default]
    None,
    FlipRight,
}

#[derive(Debug, Clone, Copy)]
struct DecodedRegion {
    region: Region,
    /// d(top, bottom) / d(raw_top, raw_bottom)
    jac_v: [[f64; 2]; 2],
    /// d(left, right) / d(raw_left, raw_right)
    jac_h: [[f64; 2]; 2],
}

/// Decodes one axis: returns `(lo, hi, jacobian)`. The Jacobian is left at
/// zero unless `with_jacobian` is set.
fn decode_axis(
    center: f64,
    raw_lo: f64,
    raw_hi: f64,
    transform: OffsetTransform,
    eps: f64,
    with_jacobian: bool,
) -> Result<(f64, f64, [[f64; 2]; 2])> {
    if !raw_lo.is_finite() || !raw_hi.is_finite() {
        return Err(Error::NonFinite("raw boundary offsets"));
    }
    let (d_lo, d_hi) = (transform.apply(raw_lo), transform.apply(raw_hi));
    if !d_lo.is_finite() || !d_hi.is_finite() {
        return Err(Error::NonFinite("transformed boundary offsets"));
    }
    let (j_lo, j_hi) = if with_jacobian {
        (transform.derivative(raw_lo), transform.derivative(raw_hi))
    } else {
        (0.0, 0.0)
    };
    if d_lo + d_hi >= eps {
        Ok((center - d_lo, center + d_hi, [[-j_lo, 0.0], [0.0, j_hi]]))
    } else {
        let mid = center + 0.5 * (d_hi - d_lo);
        let jac = [[-0.5 * j_lo, 0.5 * j_hi], [-0.5 * j_lo, 0.5 * j_hi]];
        Ok((mid - 0.5 * eps, mid + 0.5 * eps, jac))
    }
}

struct Scratch {
    m: Vec<f64>,
    logits: Vec<f64>,
    acc: Vec<f64>,
}

/// Validated view of one layer invocation.
struct Layer<'a> {
    x: &'a FeatureMap,
    /// Input regrouped as `[g][y][x][i]`, so one pixel's group channels are contiguous.
    x_grouped: Vec<f64>,
    w: &'a GroupWeights,
    offsets: &'a OffsetField,
    modulation: &'a ModulationField,
    params: &'a RadConvParams,
    out_h: usize,
    out_w: usize,
}

impl<'a> Layer<'a> {
    fn new(
        x: &'a FeatureMap,
        w: &'a GroupWeights,
        offsets: &'a OffsetField,
        modulation: &'a ModulationField,
        params: &'a RadConvParams,
    ) -> Result<Self> {
        let (c, h, wd) = x.shape();
        params.validate(c)?;
        if w.groups() != params.groups || w.channels() != c {
            return Err(Error::shape(format!(
                "weights are G={} x C/G={}, layer needs G={} x C/G={}",
                w.groups(),
                w.group_channels(),
                params.groups,
                c / params.groups
            )));
        }
        let (out_h, out_w) = params.output_size(h, wd);
        offsets.check(params.groups, params.k(), out_h, out_w)?;
        modulation.check(params.groups, params.k(), out_h, out_w)?;
        if offsets.map().data().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("raw boundary offsets"));
        }
        let cg = c / params.groups;
        let mut x_grouped = vec![0.0; x.len()];
        for g in 0..params.groups {
            for i in 0..cg {
                let plane = x.plane(g * cg + i);
                let base = g * h * wd * cg;
                for (pix, v) in plane.iter().enumerate() {
                    x_grouped[base + pix * cg + i] = *v;
                }
            }
        }
        Ok(Self {
            x,
            x_grouped,
            w,
            offsets,
            modulation,
            params,
            out_h,
            out_w,
        })
    }

    fn k(&self) -> usize {
        self.params.k()
    }

    fn group_channels(&self) -> usize {
        self.x.channels() / self.params.groups
    }

    fn decode(&self, g: usize, kk: usize, oy: usize, ox: usize, with_jacobian: bool) -> Result<DecodedRegion> {
        let k = self.k();
        let p = self.params;
        let off = p.kernel.offsets()[kk];
        let cx = (ox * p.stride) as f64 + off.dx as f64;
        let cy = (oy * p.stride) as f64 + off.dy as f64;
        let raw = |side| self.offsets.map().get(OffsetField::channel(g, k, kk, side), oy, ox);
        let (top, bottom, jac_v) = decode_axis(cy, raw(0), raw(1), p.offset_transform, p.epsilon_min, with_jacobian)?;
        let (left, right, jac_h) = decode_axis(cx, raw(2), raw(3), p.offset_transform, p.epsilon_min, with_jacobian)?;
        let slack = p.epsilon_min * (1.0 - 1e-6);
        let region = Region::with_min_extent(top, bottom, left, right, slack)?;
        Ok(DecodedRegion { region, jac_v, jac_h })
    }

    /// Normalised modulation of group `g`; `logits` is scratch of length K.
    fn modulation_for(&self, g: usize, oy: usize, ox: usize, logits: &mut [f64], out: &mut [f64]) {
        let k = self.k();
        for (kk, z) in logits.iter_mut().enumerate() {
            *z = self.modulation.map().get(g * k + kk, oy, ox);
        }
        self.params.modulation.apply(logits, out);
    }

    fn scratch(&self) -> Scratch {
        let k = self.k();
        Scratch {
            m: vec![0.0; k],
            logits: vec![0.0; k],
            acc: vec![0.0; self.group_channels()],
        }
    }

    fn forward_at(&self, oy: usize, ox: usize, out: &mut [f64], scratch: &mut Scratch) -> Result<()> {
        let cg = self.group_channels();
        let (h, wd) = (self.x.height(), self.x.width());
        let Scratch { m, logits, acc } = scratch;
        // Modulated region averages summed over k; projected once per group.
        for g in 0..self.params.groups {
            self.modulation_for(g, oy, ox, logits, m);
            acc.fill(0.0);
            let xg = &self.x_grouped[g * h * wd * cg..(g + 1) * h * wd * cg];
            for (kk, &mk) in m.iter().enumerate() {
                let dec = self.decode(g, kk, oy, ox, false)?;
                let kernel = RegionKernel::new(dec.region, h, wd);
                let scale = mk * kernel.inv_area;
                for (j, wy) in kernel.rows.weights().iter().enumerate() {
                    let row = (kernel.rows.start + j) * wd;
                    let sy = scale * wy;
                    for (i, wx) in kernel.cols.weights().iter().enumerate() {
                        let p = (row + kernel.cols.start + i) * cg;
                        let s = sy * wx;
                        for (a, v) in acc.iter_mut().zip(&xg[p..p + cg]) {
                            *a += s * v;
                        }
                    }
                }
            }
            let wg = self.w.group_matrix(g);
            for o in 0..cg {
                out[g * cg + o] = wg[o * cg..(o + 1) * cg]
                    .iter()
                    .zip(acc.iter())
                    .map(|(a, b)| a * b)
                    .sum();
            }
        }
        Ok(())
    }

    fn forward(&self) -> Result<FeatureMap> {
        let c = self.x.channels();
        let n = self.out_h * self.out_w;
        let mut cols = vec![0.0; n * c];
        cols.par_chunks_mut(c).enumerate().try_for_each_init(
            || self.scratch(),
            |scratch, (pos, v)| self.forward_at(pos / self.out_w, pos % self.out_w, v, scratch),
        )?;
        let mut out = FeatureMap::zeros(c, self.out_h, self.out_w);
        for ch in 0..c {
            for (pos, o) in out.plane_mut(ch).iter_mut().enumerate() {
                *o = cols[pos * c + ch];
            }
        }
        Ok(out)
    }

    /// Backward contributions of output rows `rows`.
    fn backward_block(
        &self,
        rows: std::ops::Range<usize>,
        upstream: &FeatureMap,
        fault: GradientFault,
    ) -> Result<BlockGrads> {
        let (k, cg, groups) = (self.k(), self.group_channels(), self.params.groups);
        let (h, wd) = (self.x.height(), self.x.width());
        let mut grad_x = vec![0.0; self.x.len()];
        let mut grad_w = vec![0.0; self.w.data().len()];
        let mut positions = Vec::with_capacity(rows.len() * self.out_w);
        let mut m = vec![0.0; k];
        let mut logits = vec![0.0; k];
        let mut d_m = vec![0.0; k];
        let mut d_logits = vec![0.0; k];
        let mut avg = vec![0.0; cg];
        let mut bound = vec![RegionGradient::default(); cg];
        let mut d_avg = vec![0.0; cg];
        for oy in rows {
            for ox in 0..self.out_w {
                let mut off_grad = vec![0.0; groups * k * SIDES];
                let mut mod_grad = vec![0.0; groups * k];
                for g in 0..groups {
                    self.modulation_for(g, oy, ox, &mut logits, &mut m);
                    let wg = self.w.group_matrix(g);
                    let up: Vec<f64> = (0..cg).map(|o| upstream.get(g * cg + o, oy, ox)).collect();
                    // Upstream pulled back through the projection: sum_o U[o] w[o][i].
                    let up_proj: Vec<f64> = (0..cg).map(|i| (0..cg).map(|o| up[o] * wg[o * cg + i]).sum()).collect();
                    for kk in 0..k {
                        let dec = self.decode(g, kk, oy, ox, true)?;
                        let kernel = RegionKernel::new(dec.region, h, wd);
                        for i in 0..cg {
                            let mom = kernel.moments(self.x.plane(g * cg + i), wd);
                            avg[i] = mom.integral * kernel.inv_area;
                            bound[i] = kernel.bound_grads(&mom);
                        }
                        d_m[kk] = up_proj.iter().zip(&avg).map(|(a, b)| a * b).sum();
                        let gw = &mut grad_w[g * cg * cg..(g + 1) * cg * cg];
                        for o in 0..cg {
                            let s = up[o] * m[kk];
                            for i in 0..cg {
                                gw[o * cg + i] += s * avg[i];
                            }
                        }
                        let mut total = RegionGradient::default();
                        for i in 0..cg {
                            d_avg[i] = m[kk] * up_proj[i];
                            let b = bound[i];
                            total.accumulate(&RegionGradient {
                                d_top: d_avg[i] * b.d_top,
                                d_bottom: d_avg[i] * b.d_bottom,
                                d_left: d_avg[i] * b.d_left,
                                d_right: d_avg[i] * b.d_right,
                            });
                            let plane = &mut grad_x[(g * cg + i) * h * wd..(g * cg + i + 1) * h * wd];
                            kernel.scatter(plane, wd, d_avg[i]);
                        }
                        if fault == GradientFault::FlipRight {
                            total.d_right = -total.d_right;
                        }
                        let base = (g * k + kk) * SIDES;
                        let jv = dec.jac_v;
                        let jh = dec.jac_h;
                        off_grad[base] = total.d_top * jv[0][0] + total.d_bottom * jv[1][0];
                        off_grad[base + 1] = total.d_top * jv[0][1] + total.d_bottom * jv[1][1];
                        off_grad[base + 2] = total.d_left * jh[0][0] + total.d_right * jh[1][0];
                        off_grad[base + 3] = total.d_left * jh[0][1] + total.d_right * jh[1][1];
                    }
                    self.params.modulation.backward(&m, &d_m, &mut d_logits);
                    mod_grad[g * k..(g + 1) * k].copy_from_slice(&d_logits);
                }
                positions.push((oy, ox, off_grad, mod_grad));
            }
        }
        Ok(BlockGrads {
            grad_x,
            grad_w,
            positions,
        })
    }
}

type PositionGrads = (usize, usize, Vec<f64>, Vec<f64>);

struct BlockGrads {
    grad_x: Vec<f64>,
    grad_w: Vec<f64>,
    positions: Vec<PositionGrads>,
}

/// The `G*K` regions of output position `(oy, ox)`, ordered `(g, k)`.
pub fn decode_regions(raw: &OffsetField, params: &RadConvParams, oy: usize, ox: usize) -> Result<Vec<Region>> {
    let (c, h, w) = raw.map().shape();
    if c != params.offset_channels() {
        return Err(Error::shape(format!(
            "offset field has {c} channels, params need {}",
            params.offset_channels()
        )));
    }
    if oy >= h || ox >= w {
        return Err(Error::arg(format!(
            "position ({oy}, {ox}) outside {h}x{w} offset field"
        )));
    }
    if !(params.epsilon_min > 0.0) {
        return Err(Error::arg("epsilon_min must be positive"));
    }
    let k = params.k();
    let mut out = Vec::with_capacity(params.groups * k);
    for g in 0..params.groups {
        for (kk, off) in params.kernel.offsets().iter().enumerate() {
            let cx = (ox * params.stride) as f64 + off.dx as f64;
            let cy = (oy * params.stride) as f64 + off.dy as f64;
            let r = |side| raw.map().get(OffsetField::channel(g, k, kk, side), oy, ox);
            let (t, b, _) = decode_axis(cy, r(0), r(1), params.offset_transform, params.epsilon_min, false)?;
            let (l, rr, _) = decode_axis(cx, r(2), r(3), params.offset_transform, params.epsilon_min, false)?;
            out.push(Region::with_min_extent(t, b, l, rr, params.epsilon_min * (1.0 - 1e-6))?);
        }
    }
    Ok(out)
}

pub fn radconv_forward(
    x: &FeatureMap,
    w: &GroupWeights,
    raw_offsets: &OffsetField,
    raw_modulation: &ModulationField,
    params: &RadConvParams,
) -> Result<FeatureMap> {
    Layer::new(x, w, raw_offsets, raw_modulation, params)?.forward()
}

/// All output channels at one output position.
pub fn radconv_forward_at(
    x: &FeatureMap,
    w: &GroupWeights,
    raw_offsets: &OffsetField,
    raw_modulation: &ModulationField,
    params: &RadConvParams,
    oy: usize,
    ox: usize,
) -> Result<Vec<f64>> {
    let layer = Layer::new(x, w, raw_offsets, raw_modulation, params)?;
    if oy >= layer.out_h || ox >= layer.out_w {
        return Err(Error::arg(format!(
            "position ({oy}, {ox}) outside {}x{} output",
            layer.out_h, layer.out_w
        )));
    }
    let mut out = vec![0.0; x.channels()];
    layer.forward_at(oy, ox, &mut out, &mut layer.scratch())?;
    Ok(out)
}

/// Gradients of `sum(upstream * forward(...))` with respect to every input.
pub fn radconv_backward(
    x: &FeatureMap,
    w: &GroupWeights,
    raw_offsets: &OffsetField,
    raw_modulation: &ModulationField,
    params: &RadConvParams,
    upstream: &FeatureMap,
) -> Result<RadConvGrads> {
    radconv_backward_with_fault(x, w, raw_offsets, raw_modulation, params, upstream, GradientFault::None)
}

pub(crate) fn radconv_backward_with_fault(
    x: &FeatureMap,
    w: &GroupWeights,
    raw_offsets: &OffsetField,
    raw_modulation: &ModulationField,
    params: &RadConvParams,
    upstream: &FeatureMap,
    fault: GradientFault,
) -> Result<RadConvGrads> {
    let layer = Layer::new(x, w, raw_offsets, raw_modulation, params)?;
    if upstream.shape() != (x.channels(), layer.out_h, layer.out_w) {
        return Err(Error::shape(format!(
            "upstream is {:?}, output is {:?}",
            upstream.shape(),
            (x.channels(), layer.out_h, layer.out_w)
        )));
    }
    let blocks: Vec<BlockGrads> = (0..layer.out_h.div_ceil(BACKWARD_ROW_BLOCK))
        .into_par_iter()
        .map(|b| {
            let rows = b * BACKWARD_ROW_BLOCK..((b + 1) * BACKWARD_ROW_BLOCK).min(layer.out_h);
            layer.backward_block(rows, upstream, fault)
        })
        .collect::<Result<_>>()?;

    let (k, groups) = (params.k(), params.groups);
    let mut grad_x = vec![0.0; x.len()];
    let mut grad_w = vec![0.0; w.data().len()];
    let mut grad_offsets = OffsetField::zeros(groups, k, layer.out_h, layer.out_w);
    let mut grad_modulation = ModulationField::zeros(groups, k, layer.out_h, layer.out_w);
    for block in blocks {
        for (acc, v) in grad_x.iter_mut().zip(&block.grad_x) {
            *acc += v;
        }
        for (acc, v) in grad_w.iter_mut().zip(&block.grad_w) {
            *acc += v;
        }
        for (oy, ox, off, modu) in block.positions {
            for (ch, v) in off.into_iter().enumerate() {
                grad_offsets.map_mut().set(ch, oy, ox, v);
            }
            for (ch, v) in modu.into_iter().enumerate() {
                grad_modulation.map_mut().set(ch, oy, ox, v);
            }
        }
    }
    let (c, h, wd) = x.shape();
    Ok(RadConvGrads {
        grad_x: FeatureMap::new(c, h, wd, grad_x)?,
        grad_w: GroupWeights::new(groups, w.group_channels(), grad_w)?,
        grad_offsets,
        grad_modulation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{KernelGrid, ModulationMode};
    use crate::region::region_average;

    fn fill(f: &mut FeatureMap, v: f64) {
        f.data_mut().fill(v);
    }

    #[test]
    fn decode_ln2_gives_distance_two() {
        let params = RadConvParams::new(KernelGrid::pointwise());
        let mut raw = OffsetField::zeros(1, 1, 8, 8);
        fill(raw.map_mut(), 2f64.ln());
        let r = decode_regions(&raw, &params, 5, 5).unwrap()[0];
        assert_eq!((r.top(), r.bottom(), r.left(), r.right()), (3.0, 7.0, 3.0, 7.0));
    }

    #[test]
    fn decode_zero_gives_unit_distances() {
        let params = RadConvParams::new(KernelGrid::square(3).unwrap());
        let raw = OffsetField::zeros(1, 9, 4, 4);
        let regions = decode_regions(&raw, &params, 1, 2).unwrap();
        assert_eq!(regions.len(), 9);
        // k = 0 sits at (dx, dy) = (-1, -1) from (x, y) = (2, 1).
        let r = regions[0];
        assert_eq!((r.top(), r.bottom(), r.left(), r.right()), (-1.0, 1.0, 0.0, 2.0));
    }

    #[test]
    fn decode_follows_stride() {
        let params = RadConvParams::new(KernelGrid::pointwise()).with_stride(2);
        let raw = OffsetField::zeros(1, 1, 3, 3);
        let r = decode_regions(&raw, &params, 1, 2).unwrap()[0];
        assert_eq!((r.top(), r.left()), (1.0, 3.0));
    }

    #[test]
    fn decode_clamps_to_min_extent() {
        let params = RadConvParams::new(KernelGrid::pointwise()).with_epsilon_min(0.01);
        let mut raw = OffsetField::zeros(1, 1, 2, 2);
        fill(raw.map_mut(), -20.0);
        let r = decode_regions(&raw, &params, 0, 0).unwrap()[0];
        assert!((r.height() - 0.01).abs() < 1e-12 && (r.width() - 0.01).abs() < 1e-12);
        assert!(r.top() < 0.0 && r.bottom() > 0.0);
    }

    #[test]
    fn decode_rejects_overflow_and_bad_shapes() {
        let params = RadConvParams::new(KernelGrid::pointwise());
        let mut raw = OffsetField::zeros(1, 1, 2, 2);
        fill(raw.map_mut(), 800.0);
        assert!(matches!(decode_regions(&raw, &params, 0, 0), Err(Error::NonFinite(_))));
        let raw = OffsetField::zeros(1, 9, 2, 2);
        assert!(decode_regions(&raw, &params, 0, 0).is_err());
        let raw = OffsetField::zeros(1, 1, 2, 2);
        assert!(decode_regions(&raw, &params, 2, 0).is_err());
    }

    #[test]
    fn constant_input_gives_constant_output() {
        let params = RadConvParams::new(KernelGrid::pointwise()).with_modulation(ModulationMode::None);
        let x = FeatureMap::filled(1, 8, 8, 4.5);
        let raw = OffsetField::zeros(1, 1, 8, 8);
        let mut modu = ModulationField::zeros(1, 1, 8, 8);
        fill(modu.map_mut(), 1.0);
        let y = radconv_forward(&x, &GroupWeights::identity(1, 1), &raw, &modu, &params).unwrap();
        for yy in 1..7 {
            for xx in 1..7 {
                assert!((y.get(0, yy, xx) - 4.5).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn full_extent_region_gives_plane_mean() {
        let x = FeatureMap::from_fn(1, 4, 4, |_, _, xx| xx as f64).unwrap();
        let params = RadConvParams::new(KernelGrid::pointwise());
        let mut raw = OffsetField::zeros(1, 1, 4, 4);
        // At (1, 1): top=0, bottom=3, left=0, right=3.
        for (side, d) in [1.0, 2.0, 1.0, 2.0].iter().enumerate() {
            raw.map_mut().set(side, 1, 1, f64::ln(*d));
        }
        let modu = ModulationField::zeros(1, 1, 4, 4);
        let y = radconv_forward_at(&x, &GroupWeights::identity(1, 1), &raw, &modu, &params, 1, 1).unwrap();
        let r = Region::new(0.0, 3.0, 0.0, 3.0).unwrap();
        assert!((y[0] - region_average(&x, 0, &r).unwrap()).abs() < 1e-14);
        assert!((y[0] - 1.5).abs() < 1e-14);
    }

    #[test]
    fn forward_at_matches_forward() {
        let mut rng = crate::rng::XorShift64Star::new(5);
        let params = RadConvParams::new(KernelGrid::square(3).unwrap()).with_groups(2);
        let x = FeatureMap::from_fn(4, 6, 6, |_, _, _| rng.uniform(-1.0, 1.0)).unwrap();
        let mut w = GroupWeights::zeros(2, 2);
        rng.fill_uniform(w.data_mut(), -1.0, 1.0);
        let mut raw = OffsetField::zeros(2, 9, 6, 6);
        rng.fill_uniform(raw.map_mut().data_mut(), -1.0, 1.0);
        let mut modu = ModulationField::zeros(2, 9, 6, 6);
        rng.fill_uniform(modu.map_mut().data_mut(), -1.0, 1.0);
        let y = radconv_forward(&x, &w, &raw, &modu, &params).unwrap();
        let at = radconv_forward_at(&x, &w, &raw, &modu, &params, 2, 3).unwrap();
        for c in 0..4 {
            assert_eq!(y.get(c, 2, 3), at[c]);
        }
    }

    #[test]
    fn zero_upstream_gives_zero_gradients() {
        let mut rng = crate::rng::XorShift64Star::new(6);
        let params = RadConvParams::new(KernelGrid::square(3).unwrap());
        let x = FeatureMap::from_fn(1, 5, 5, |_, _, _| rng.uniform(-1.0, 1.0)).unwrap();
        let w = GroupWeights::new(1, 1, vec![0.7]).unwrap();
        let mut raw = OffsetField::zeros(1, 9, 5, 5);
        rng.fill_uniform(raw.map_mut().data_mut(), -1.0, 1.0);
        let modu = ModulationField::zeros(1, 9, 5, 5);
        let up = FeatureMap::zeros(1, 5, 5);
        let g = radconv_backward(&x, &w, &raw, &modu, &params, &up).unwrap();
        assert!(g.grad_x.data().iter().all(|&v| v == 0.0));
        assert!(g.grad_w.data().iter().all(|&v| v == 0.0));
        assert!(g.grad_offsets.map().data().iter().all(|&v| v == 0.0));
        assert!(g.grad_modulation.map().data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_input_has_zero_offset_gradient_inside() {
        let params = RadConvParams::new(KernelGrid::square(3).unwrap());
        let x = FeatureMap::filled(1, 12, 12, 2.0);
        let w = GroupWeights::new(1, 1, vec![1.3]).unwrap();
        let mut raw = OffsetField::zeros(1, 9, 12, 12);
        let mut rng = crate::rng::XorShift64Star::new(7);
        rng.fill_uniform(raw.map_mut().data_mut(), -2.0, -0.2);
        let modu = ModulationField::zeros(1, 9, 12, 12);
        let up = FeatureMap::filled(1, 12, 12, 1.0);
        let g = radconv_backward(&x, &w, &raw, &modu, &params, &up).unwrap();
        // Regions around positions 2..10 stay inside the domain.
        for ch in 0..36 {
            for yy in 2..10 {
                for xx in 2..10 {
                    assert!(g.grad_offsets.map().get(ch, yy, xx).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn shape_mismatches_are_rejected() {
        let params = RadConvParams::new(KernelGrid::pointwise());
        let x = FeatureMap::filled(2, 4, 4, 1.0);
        let raw = OffsetField::zeros(1, 1, 4, 4);
        let modu = ModulationField::zeros(1, 1, 4, 4);
        assert!(radconv_forward(&x, &GroupWeights::identity(1, 1), &raw, &modu, &params).is_err());
        let w = GroupWeights::identity(1, 2);
        assert!(radconv_forward(&x, &w, &OffsetField::zeros(1, 1, 3, 4), &modu, &params).is_err());
        assert!(radconv_forward(&x, &w, &raw, &ModulationField::zeros(1, 2, 4, 4), &params).is_err());
        let bad_up = FeatureMap::zeros(2, 3, 4);
        assert!(radconv_backward(&x, &w, &raw, &modu, &params, &bad_up).is_err());
        let mut nan_raw = raw.clone();
        nan_raw.map_mut().data_mut()[0] = f64::NAN;
        assert!(radconv_forward(&x, &w, &nan_raw, &modu, &params).is_err());
    }
}
