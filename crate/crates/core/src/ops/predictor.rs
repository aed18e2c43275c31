use super::conv::standard_conv_forward_strided;
use super::{ConvWeights, KernelGrid, ModulationField, OffsetField, RadConvParams};
use crate::error::{Error, Result};
use crate::numerics::FeatureMap;

/// Zero-initialised 3x3 predictor for `channels` inputs: every region
/// decodes to unit distances and modulation logits start equal.
pub fn predictor_weights(channels: usize, params: &RadConvParams) -> ConvWeights {
    ConvWeights::zeros(params.offset_channels() + params.modulation_channels(), channels, 9)
}

/// Runs the companion 3x3 convolution and splits its output into raw
/// boundary offsets (first `G*4K` channels) and raw modulation logits (the
/// remaining `G*K`).
pub fn predictor_conv(
    x: &FeatureMap,
    predictor: &ConvWeights,
    params: &RadConvParams,
) -> Result<(OffsetField, ModulationField)> {
    params.validate(x.channels())?;
    let n_off = params.offset_channels();
    let n_mod = params.modulation_channels();
    if predictor.out_channels() != n_off + n_mod {
        return Err(Error::shape(format!(
            "predictor outputs {} channels, G*5K = {}",
            predictor.out_channels(),
            n_off + n_mod
        )));
    }
    if predictor.k() != 9 {
        return Err(Error::shape(format!(
            "predictor must be 3x3, has {} elements",
            predictor.k()
        )));
    }
    let out = standard_conv_forward_strided(x, predictor, &KernelGrid::square(3)?, params.stride)?;
    let (_, h, w) = out.shape();
    let plane = h * w;
    let data = out.into_data();
    let offsets = FeatureMap::new(n_off, h, w, data[..n_off * plane].to_vec())?;
    let modulation = FeatureMap::new(n_mod, h, w, data[n_off * plane..].to_vec())?;
    Ok((offsets.into(), modulation.into()))
}
