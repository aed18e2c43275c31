//! Standard convolution and the DCN lineage on one input, including the
//! zero-offset reductions that tie them together.

use radconv::ops::{
    dcn_forward, standard_conv_forward, ConvWeights, DcnVariant, GroupWeights, KernelGrid, ModulationField,
    PointOffsetField,
};
use radconv::rng::XorShift64Star;
use radconv::FeatureMap;

fn max_diff(a: &FeatureMap, b: &FeatureMap) -> f64 {
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn main() -> radconv::Result<()> {
    let mut rng = XorShift64Star::new(2);
    let (c, h, w) = (4, 6, 6);
    let grid = KernelGrid::square(3)?;
    let k = grid.len();
    let x = FeatureMap::from_fn(c, h, w, |_, _, _| rng.uniform(-1.0, 1.0))?;
    let mut gw = GroupWeights::zeros(2, c / 2);
    rng.fill_uniform(gw.data_mut(), -1.0, 1.0);
    let dense: ConvWeights = gw.to_conv_weights(k);

    let conv = standard_conv_forward(&x, &dense, &grid)?;
    let zero = PointOffsetField::zeros(1, k, h, w);
    let v1 = dcn_forward(&x, &dense, &grid, &zero, None, DcnVariant::V1)?;
    println!("DCNv1, zero offsets vs conv:           {:.1e}", max_diff(&conv, &v1));

    let zero_g = PointOffsetField::zeros(2, k, h, w);
    let equal = ModulationField::new(FeatureMap::filled(2 * k, h, w, 0.5));
    let v3 = dcn_forward(&x, &dense, &grid, &zero_g, Some(&equal), DcnVariant::V3)?;
    let scaled = FeatureMap::new(c, h, w, conv.data().iter().map(|v| v / k as f64).collect())?;
    println!("DCNv3, equal logits vs conv / K:       {:.1e}", max_diff(&scaled, &v3));

    let mut moved = PointOffsetField::zeros(2, k, h, w);
    rng.fill_uniform(moved.map_mut().data_mut(), -1.5, 1.5);
    for variant in [DcnVariant::V1, DcnVariant::V2, DcnVariant::V3, DcnVariant::V4] {
        let m = variant.modulation_mode().map(|_| &equal);
        let y = dcn_forward(&x, &dense, &grid, &moved, m, variant)?;
        println!("{variant:?} with random offsets: y[0, 2, 3] = {:+.6}", y.get(0, 2, 3));
    }
    Ok(())
}
