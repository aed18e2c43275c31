//! Bilinear sampling at continuous positions, with zero padding outside the map.

use radconv::{bilinear_sample, ContinuousPoint, FeatureMap};

fn main() -> radconv::Result<()> {
    // 1 x 3 x 4 ramp: value = 10 * y + x.
    let map = FeatureMap::from_fn(1, 3, 4, |_, y, x| (10 * y + x) as f64)?;
    for (x, y) in [
        (0.0, 0.0),
        (1.5, 0.5),
        (2.25, 1.75),
        (3.5, 1.0),
        (-0.5, -0.5),
        (5.0, 1.0),
    ] {
        let v = bilinear_sample(&map, 0, ContinuousPoint::new(x, y)?)?;
        println!("x = {x:5.2}, y = {y:5.2} -> {v:7.3}");
    }
    Ok(())
}
