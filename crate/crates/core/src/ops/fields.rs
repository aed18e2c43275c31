use crate::error::{Error, Result};
use crate::numerics::FeatureMap;

macro_rules! field_newtype {
    ($(#[$doc:meta])* $name:ident, $per_group:literal, $what:literal) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name(FeatureMap);

        impl $name {
            pub fn new(map: FeatureMap) -> Self {
                Self(map)
            }

            pub fn zeros(groups: usize, k: usize, height: usize, width: usize) -> Self {
                Self(FeatureMap::zeros(groups * $per_group * k, height, width))
            }

            pub fn map(&self) -> &FeatureMap {
                &self.0
            }

            pub fn map_mut(&mut self) -> &mut FeatureMap {
                &mut self.0
            }

            pub fn into_map(self) -> FeatureMap {
                self.0
            }

            /// Checks the channel count for `groups x k` and the spatial size.
            pub fn check(&self, groups: usize, k: usize, height: usize, width: usize) -> Result<()> {
                let (c, h, w) = self.0.shape();
                if c != groups * $per_group * k || h != height || w != width {
                    return Err(Error::shape(format!(
                        concat!($what, " field is {}x{}x{}, expected {}x{}x{}"),
                        c, h, w, groups * $per_group * k, height, width
                    )));
                }
                Ok(())
            }
        }

        impl From<FeatureMap> for $name {
            fn from(map: FeatureMap) -> Self {
                Self(map)
            }
        }
    };
}

field_newtype!(
    /// Raw (pre-transform) boundary logits, `G*4K` channels ordered
    /// `(g, k, [top, bottom, left, right])`.
    OffsetField, 4, "offset"
);
field_newtype!(
    /// Raw modulation logits, `G*K` channels ordered `(g, k)`.
    ModulationField, 1, "modulation"
);
field_newtype!(
    /// Point displacements for deformable convolution, `G*2K` channels
    /// ordered `(g, k, [dx, dy])`.
    PointOffsetField, 2, "point offset"
);

impl OffsetField {
    #[inline]
    pub(crate) fn channel(g: usize, k: usize, kk: usize, side: usize) -> usize {
        (g * k + kk) * 4 + side
    }
}

/// Dense per-element kernel: `out x in x K` weights plus a bias per output
/// channel. Used by standard convolution, DCN and the offset predictor.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvWeights {
    out_channels: usize,
    in_channels: usize,
    k: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl ConvWeights {
    /// `weights` is ordered `(out, in, k)`.
    pub fn new(out_channels: usize, in_channels: usize, k: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if out_channels == 0 || in_channels == 0 || k == 0 {
            return Err(Error::shape("conv weights need positive dims"));
        }
        if weights.len() != out_channels * in_channels * k || bias.len() != out_channels {
            return Err(Error::shape(format!(
                "conv weights for {out_channels}x{in_channels}x{k} need {} weights and {out_channels} biases, got {} and {}",
                out_channels * in_channels * k,
                weights.len(),
                bias.len()
            )));
        }
        if weights.iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("conv weights"));
        }
        Ok(Self {
            out_channels,
            in_channels,
            k,
            weights,
            bias,
        })
    }

    pub fn zeros(out_channels: usize, in_channels: usize, k: usize) -> Self {
        Self::new(
            out_channels,
            in_channels,
            k,
            vec![0.0; out_channels * in_channels * k],
            vec![0.0; out_channels],
        )
        .expect("positive dims")
    }

    /// Same weight on every element, zero bias.
    pub fn constant(out_channels: usize, in_channels: usize, k: usize, value: f64) -> Self {
        let mut w = Self::zeros(out_channels, in_channels, k);
        w.weights.fill(value);
        w
    }

    /// Centre element 1 on the diagonal, everything else 0.
    pub fn identity(channels: usize, k: usize, center: usize) -> Self {
        let mut w = Self::zeros(channels, channels, k);
        for c in 0..channels {
            w.set(c, c, center, 1.0);
        }
        w
    }

    pub fn out_channels(&self) -> usize {
        self.out_channels
    }
    pub fn in_channels(&self) -> usize {
        self.in_channels
    }
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, o: usize, i: usize, kk: usize) -> f64 {
        self.weights[(o * self.in_channels + i) * self.k + kk]
    }

    pub fn set(&mut self, o: usize, i: usize, kk: usize, v: f64) {
        self.weights[(o * self.in_channels + i) * self.k + kk] = v;
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Per-group channel projection shared across kernel elements and
/// positions: `G` matrices of `(C/G) x (C/G)`, ordered `(g, out, in)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupWeights {
    groups: usize,
    group_channels: usize,
    data: Vec<f64>,
}

impl GroupWeights {
    pub fn new(groups: usize, group_channels: usize, data: Vec<f64>) -> Result<Self> {
        if groups == 0 || group_channels == 0 {
            return Err(Error::shape("group weights need positive dims"));
        }
        if data.len() != groups * group_channels * group_channels {
            return Err(Error::shape(format!(
                "group weights for G={groups}, C/G={group_channels} need {} values, got {}",
                groups * group_channels * group_channels,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("group weights"));
        }
        Ok(Self {
            groups,
            group_channels,
            data,
        })
    }

    pub fn zeros(groups: usize, group_channels: usize) -> Self {
        Self::new(
            groups,
            group_channels,
            vec![0.0; groups * group_channels * group_channels],
        )
        .expect("positive dims")
    }

    /// Identity projection in every group.
    pub fn identity(groups: usize, group_channels: usize) -> Self {
        let mut w = Self::zeros(groups, group_channels);
        for g in 0..groups {
            for c in 0..group_channels {
                w.set(g, c, c, 1.0);
            }
        }
        w
    }

    pub fn groups(&self) -> usize {
        self.groups
    }
    pub fn group_channels(&self) -> usize {
        self.group_channels
    }
    pub fn channels(&self) -> usize {
        self.groups * self.group_channels
    }

    #[inline]
    pub fn get(&self, g: usize, o: usize, i: usize) -> f64 {
        self.data[(g * self.group_channels + o) * self.group_channels + i]
    }

    pub fn set(&mut self, g: usize, o: usize, i: usize, v: f64) {
        let n = self.group_channels;
        self.data[(g * n + o) * n + i] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub(crate) fn group_matrix(&self, g: usize) -> &[f64] {
        let n = self.group_channels * self.group_channels;
        &self.data[g * n..(g + 1) * n]
    }

    /// Block-diagonal dense kernel with the same projection on all `k`
    /// elements: the standard grouped convolution these weights describe.
    pub fn to_conv_weights(&self, k: usize) -> ConvWeights {
        let c = self.channels();
        let n = self.group_channels;
        let mut w = ConvWeights::zeros(c, c, k);
        for g in 0..self.groups {
            for o in 0..n {
                for i in 0..n {
                    for kk in 0..k {
                        w.set(g * n + o, g * n + i, kk, self.get(g, o, i));
                    }
                }
            }
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_shape_checks() {
        let f = OffsetField::zeros(2, 9, 4, 5);
        assert!(f.check(2, 9, 4, 5).is_ok());
        assert!(f.check(1, 9, 4, 5).is_err());
        assert!(f.check(2, 9, 5, 5).is_err());
        assert_eq!(OffsetField::channel(1, 9, 2, 3), 47);
        assert!(ModulationField::zeros(2, 9, 4, 5).check(2, 9, 4, 5).is_ok());
        assert!(PointOffsetField::zeros(1, 9, 4, 5).check(1, 9, 4, 5).is_ok());
    }

    #[test]
    fn weight_validation() {
        assert!(ConvWeights::new(2, 2, 9, vec![0.0; 36], vec![0.0; 2]).is_ok());
        assert!(ConvWeights::new(2, 2, 9, vec![0.0; 35], vec![0.0; 2]).is_err());
        assert!(ConvWeights::new(1, 1, 1, vec![f64::NAN], vec![0.0]).is_err());
        assert!(GroupWeights::new(2, 2, vec![0.0; 8]).is_ok());
        assert!(GroupWeights::new(2, 2, vec![0.0; 7]).is_err());
    }

    #[test]
    fn grouped_expansion_is_block_diagonal() {
        let w = GroupWeights::new(2, 1, vec![3.0, -2.0]).unwrap();
        let c = w.to_conv_weights(9);
        for kk in 0..9 {
            assert_eq!(c.get(0, 0, kk), 3.0);
            assert_eq!(c.get(1, 1, kk), -2.0);
            assert_eq!(c.get(0, 1, kk), 0.0);
            assert_eq!(c.get(1, 0, kk), 0.0);
        }
    }
}
