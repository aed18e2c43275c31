use super::{ConvWeights, KernelGrid};
use crate::error::{Error, Result};
use crate::numerics::FeatureMap;

/// `y[o](p0) = b[o] + sum_k sum_i w[o][i][k] * x[i](p0 + p_k)` with zero
/// padding, stride 1.
pub fn standard_conv_forward(x: &FeatureMap, w: &ConvWeights, grid: &KernelGrid) -> Result<FeatureMap> {
    standard_conv_forward_strided(x, w, grid, 1)
}

/// Output position `(oy, ox)` reads around input pixel `(oy*stride, ox*stride)`.
pub fn standard_conv_forward_strided(
    x: &FeatureMap,
    w: &ConvWeights,
    grid: &KernelGrid,
    stride: usize,
) -> Result<FeatureMap> {
    check_weights(x, w, grid)?;
    if stride == 0 {
        return Err(Error::arg("stride must be positive"));
    }
    let (c_in, h, wd) = x.shape();
    let (ho, wo) = ((h - 1) / stride + 1, (wd - 1) / stride + 1);
    let mut out = FeatureMap::zeros(w.out_channels(), ho, wo);
    for o in 0..w.out_channels() {
        for oy in 0..ho {
            for ox in 0..wo {
                let (cy, cx) = ((oy * stride) as i64, (ox * stride) as i64);
                let mut acc = w.bias()[o];
                for (kk, off) in grid.offsets().iter().enumerate() {
                    for i in 0..c_in {
                        acc += w.get(o, i, kk) * x.get_padded(i, cy + off.dy, cx + off.dx);
                    }
                }
                out.set(o, oy, ox, acc);
            }
        }
    }
    Ok(out)
}

pub(crate) fn check_weights(x: &FeatureMap, w: &ConvWeights, grid: &KernelGrid) -> Result<()> {
    if w.in_channels() != x.channels() {
        return Err(Error::shape(format!(
            "kernel expects {} input channels, map has {}",
            w.in_channels(),
            x.channels()
        )));
    }
    if w.k() != grid.len() {
        return Err(Error::shape(format!(
            "kernel has {} elements, grid has {}",
            w.k(),
            grid.len()
        )));
    }
    Ok(())
}
