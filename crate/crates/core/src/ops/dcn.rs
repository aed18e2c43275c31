use super::conv::check_weights;
use super::{ConvWeights, KernelGrid, ModulationField, ModulationMode, PointOffsetField};
use crate::error::{Error, Result};
use crate::numerics::{bilinear_unchecked, FeatureMap};

/// Deformable convolution lineage. Forward only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcnVariant {
    /// Learned point offsets, no modulation.
    V1,
    /// Plus sigmoid modulation.
    V2,
    /// Grouped offsets with softmax modulation over kernel elements.
    V3,
    /// As V3 with the modulation logits used unnormalised.
    V4,
}

impl DcnVariant {
    pub fn modulation_mode(self) -> Option<ModulationMode> {
        match self {
            DcnVariant::V1 => None,
            DcnVariant::V2 => Some(ModulationMode::Sigmoid),
            DcnVariant::V3 => Some(ModulationMode::SoftmaxOverK),
            DcnVariant::V4 => Some(ModulationMode::None),
        }
    }
}

/// `y[o](p0) = b[o] + sum_k sum_i w[o][i][k] * m[g(i)][k] * x[i](p0 + p_k + dp[g(i)][k])`
///
/// The group count is read from the offset field (`G*2K` channels); input
/// channel `i` belongs to group `i / (C/G)`. For V3/V4 semantics with a
/// shared per-group projection pass [`super::GroupWeights::to_conv_weights`].
pub fn dcn_forward(
    x: &FeatureMap,
    w: &ConvWeights,
    grid: &KernelGrid,
    offsets: &PointOffsetField,
    modulation: Option<&ModulationField>,
    variant: DcnVariant,
) -> Result<FeatureMap> {
    check_weights(x, w, grid)?;
    let (c, h, wd) = x.shape();
    let k = grid.len();
    let oc = offsets.map().channels();
    if oc == 0 || !oc.is_multiple_of(2 * k) {
        return Err(Error::shape(format!(
            "point offset field has {oc} channels, not a multiple of 2K={}",
            2 * k
        )));
    }
    let groups = oc / (2 * k);
    if c % groups != 0 {
        return Err(Error::shape(format!("{c} channels not divisible into {groups} groups")));
    }
    offsets.check(groups, k, h, wd)?;
    let mode = variant.modulation_mode();
    match (mode, modulation) {
        (None, Some(_)) => return Err(Error::arg("DCNv1 takes no modulation")),
        (Some(_), None) => return Err(Error::arg(format!("{variant:?} requires a modulation field"))),
        (Some(_), Some(m)) => m.check(groups, k, h, wd)?,
        (None, None) => {}
    }
    let cg = c / groups;
    let mut out = FeatureMap::zeros(w.out_channels(), h, wd);
    let mut logits = vec![0.0; k];
    let mut m = vec![1.0; k];
    let mut samples = vec![0.0; c * k];
    for y0 in 0..h {
        for x0 in 0..wd {
            for g in 0..groups {
                if let (Some(mode), Some(field)) = (mode, modulation) {
                    for (kk, l) in logits.iter_mut().enumerate() {
                        *l = field.map().get(g * k + kk, y0, x0);
                    }
                    mode.apply(&logits, &mut m);
                }
                for (kk, off) in grid.offsets().iter().enumerate() {
                    let px = (x0 as i64 + off.dx) as f64 + offsets.map().get((g * k + kk) * 2, y0, x0);
                    let py = (y0 as i64 + off.dy) as f64 + offsets.map().get((g * k + kk) * 2 + 1, y0, x0);
                    for i in g * cg..(g + 1) * cg {
                        samples[i * k + kk] = m[kk] * bilinear_unchecked(x, i, px, py);
                    }
                }
            }
            for o in 0..w.out_channels() {
                let mut acc = w.bias()[o];
                for i in 0..c {
                    for kk in 0..k {
                        acc += w.get(o, i, kk) * samples[i * k + kk];
                    }
                }
                out.set(o, y0, x0, acc);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{standard_conv_forward, GroupWeights};
    use crate::rng::XorShift64Star;

    fn random_map(rng: &mut XorShift64Star, c: usize, h: usize, w: usize) -> FeatureMap {
        FeatureMap::from_fn(c, h, w, |_, _, _| rng.uniform(-1.0, 1.0)).unwrap()
    }

    #[test]
    fn zero_offsets_v1_is_standard_conv() {
        let mut rng = XorShift64Star::new(3);
        let x = random_map(&mut rng, 2, 6, 7);
        let grid = KernelGrid::square(3).unwrap();
        let mut w = ConvWeights::zeros(3, 2, 9);
        for o in 0..3 {
            for i in 0..2 {
                for kk in 0..9 {
                    w.set(o, i, kk, rng.uniform(-1.0, 1.0));
                }
            }
        }
        let off = PointOffsetField::zeros(1, 9, 6, 7);
        let a = dcn_forward(&x, &w, &grid, &off, None, DcnVariant::V1).unwrap();
        let b = standard_conv_forward(&x, &w, &grid).unwrap();
        for (u, v) in a.data().iter().zip(b.data()) {
            assert!((u - v).abs() <= 1e-12);
        }
    }

    #[test]
    fn uniform_softmax_scales_grouped_conv() {
        let mut rng = XorShift64Star::new(4);
        let x = random_map(&mut rng, 4, 5, 5);
        let grid = KernelGrid::square(3).unwrap();
        let mut gw = GroupWeights::zeros(2, 2);
        rng.fill_uniform(gw.data_mut(), -1.0, 1.0);
        let w = gw.to_conv_weights(9);
        let off = PointOffsetField::zeros(2, 9, 5, 5);
        let modu = ModulationField::new(FeatureMap::filled(18, 5, 5, 0.4));
        let a = dcn_forward(&x, &w, &grid, &off, Some(&modu), DcnVariant::V3).unwrap();
        let b = standard_conv_forward(&x, &w, &grid).unwrap();
        for (u, v) in a.data().iter().zip(b.data()) {
            assert!((u - v / 9.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn half_pixel_shift_on_ramp() {
        let x = FeatureMap::from_fn(1, 6, 6, |_, _, xx| xx as f64).unwrap();
        let grid = KernelGrid::pointwise();
        let w = ConvWeights::constant(1, 1, 1, 1.0);
        let mut off = PointOffsetField::zeros(1, 1, 6, 6);
        off.map_mut().data_mut()[..36].fill(0.5);
        let y = dcn_forward(&x, &w, &grid, &off, None, DcnVariant::V1).unwrap();
        for yy in 0..6 {
            for xx in 0..5 {
                assert_eq!(y.get(0, yy, xx), xx as f64 + 0.5);
            }
        }
    }

    #[test]
    fn sigmoid_and_raw_modulation() {
        let x = FeatureMap::filled(1, 3, 3, 2.0);
        let grid = KernelGrid::pointwise();
        let w = ConvWeights::constant(1, 1, 1, 1.0);
        let off = PointOffsetField::zeros(1, 1, 3, 3);
        let modu = ModulationField::new(FeatureMap::filled(1, 3, 3, 0.0));
        let v2 = dcn_forward(&x, &w, &grid, &off, Some(&modu), DcnVariant::V2).unwrap();
        assert_eq!(v2.get(0, 1, 1), 1.0);
        let modu = ModulationField::new(FeatureMap::filled(1, 3, 3, -3.0));
        let v4 = dcn_forward(&x, &w, &grid, &off, Some(&modu), DcnVariant::V4).unwrap();
        assert_eq!(v4.get(0, 1, 1), -6.0);
    }

    #[test]
    fn modulation_contract() {
        let x = FeatureMap::filled(1, 3, 3, 1.0);
        let grid = KernelGrid::pointwise();
        let w = ConvWeights::constant(1, 1, 1, 1.0);
        let off = PointOffsetField::zeros(1, 1, 3, 3);
        let modu = ModulationField::zeros(1, 1, 3, 3);
        for v in [DcnVariant::V2, DcnVariant::V3, DcnVariant::V4] {
            assert!(matches!(
                dcn_forward(&x, &w, &grid, &off, None, v),
                Err(Error::Argument(_))
            ));
        }
        assert!(dcn_forward(&x, &w, &grid, &off, Some(&modu), DcnVariant::V1).is_err());
        let bad = PointOffsetField::zeros(1, 1, 3, 2);
        assert!(dcn_forward(&x, &w, &grid, &bad, None, DcnVariant::V1).is_err());
    }
}
