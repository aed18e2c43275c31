//! A RAD-Conv layer end to end: the offset predictor, region decoding,
//! the forward pass and the backward pass.

use radconv::ops::{
    decode_regions, predictor_conv, predictor_weights, radconv_backward, radconv_forward, GroupWeights, KernelGrid,
    RadConvParams,
};
use radconv::rng::XorShift64Star;
use radconv::FeatureMap;

fn main() -> radconv::Result<()> {
    let mut rng = XorShift64Star::new(3);
    let (c, h, w) = (4, 8, 8);
    let params = RadConvParams::new(KernelGrid::square(3)?).with_groups(2);
    let x = FeatureMap::from_fn(c, h, w, |_, _, _| rng.uniform(-1.0, 1.0))?;

    // Zero predictor plus a small perturbation so regions differ per position.
    let mut predictor = predictor_weights(c, &params);
    for o in 0..predictor.out_channels() {
        for i in 0..c {
            for kk in 0..9 {
                predictor.set(o, i, kk, rng.uniform(-0.05, 0.05));
            }
        }
    }
    let (offsets, modulation) = predictor_conv(&x, &predictor, &params)?;
    for (kk, r) in decode_regions(&offsets, &params, 4, 4)?.iter().enumerate().take(3) {
        println!(
            "position (4, 4), group 0, element {kk}: [{:.3}, {:.3}] x [{:.3}, {:.3}]",
            r.top(),
            r.bottom(),
            r.left(),
            r.right()
        );
    }

    let mut weights = GroupWeights::identity(2, c / 2);
    weights.set(1, 0, 1, 0.5);
    let y = radconv_forward(&x, &weights, &offsets, &modulation, &params)?;
    println!("output {:?}, y[0, 4, 4] = {:+.6}", y.shape(), y.get(0, 4, 4));

    let upstream = FeatureMap::filled(c, h, w, 1.0);
    let g = radconv_backward(&x, &weights, &offsets, &modulation, &params, &upstream)?;
    println!(
        "|grad x|max = {:.4}, |grad offsets|max = {:.4}, |grad modulation|max = {:.4}",
        g.grad_x.max_abs(),
        g.grad_offsets.map().max_abs(),
        g.grad_modulation.map().max_abs()
    );
    Ok(())
}
