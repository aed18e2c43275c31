//! Closed-form derivatives of a region average with respect to its four
//! boundaries, next to central differences.

use radconv::rng::XorShift64Star;
use radconv::{region_average, region_average_backward, FeatureMap, Region};

fn main() -> radconv::Result<()> {
    let mut rng = XorShift64Star::new(4);
    let map = FeatureMap::from_fn(1, 6, 6, |_, _, _| rng.uniform(-1.0, 1.0))?;
    let (t, b, l, r) = (1.3, 3.8, 0.6, 4.2);
    let g = region_average_backward(&map, 0, &Region::new(t, b, l, r)?, 1.0)?.bound_grads;
    let h = 1e-6;
    let avg = |t, b, l, r| region_average(&map, 0, &Region::new(t, b, l, r).unwrap()).unwrap();
    let fd = [
        (avg(t + h, b, l, r) - avg(t - h, b, l, r)) / (2.0 * h),
        (avg(t, b + h, l, r) - avg(t, b - h, l, r)) / (2.0 * h),
        (avg(t, b, l + h, r) - avg(t, b, l - h, r)) / (2.0 * h),
        (avg(t, b, l, r + h) - avg(t, b, l, r - h)) / (2.0 * h),
    ];
    let analytic = [g.d_top, g.d_bottom, g.d_left, g.d_right];
    for ((name, a), n) in ["top", "bottom", "left", "right"].iter().zip(analytic).zip(fd) {
        println!("d/d{name:<6} analytic {a:+.10}  central difference {n:+.10}");
    }
    Ok(())
}
