//! Exact region averages of the bilinear surface against midpoint quadrature.

use radconv::region::quadrature_oracle;
use radconv::rng::XorShift64Star;
use radconv::{region_average, FeatureMap, Region};

fn main() -> radconv::Result<()> {
    let mut rng = XorShift64Star::new(1);
    let map = FeatureMap::from_fn(1, 8, 8, |_, _, _| rng.uniform(-1.0, 1.0))?;
    let regions = [
        Region::new(1.2, 3.7, 0.4, 5.9)?,
        Region::new(-0.5, 7.5, -0.5, 7.5)?,
        Region::centered(4.0, 4.0, 1e-3)?,
        Region::new(6.1, 9.0, 6.5, 8.8)?,
    ];
    println!(
        "{:>34}  {:>12}  {:>12}  {:>9}",
        "region [top, bottom] x [left, right]", "exact", "n=2048", "|diff|"
    );
    for r in &regions {
        let exact = region_average(&map, 0, r)?;
        let quad = quadrature_oracle(&map, 0, r, 2048)?;
        println!(
            "[{:5.2}, {:5.2}] x [{:5.2}, {:5.2}]         {exact:12.8}  {quad:12.8}  {:9.2e}",
            r.top(),
            r.bottom(),
            r.left(),
            r.right(),
            (exact - quad).abs()
        );
    }
    Ok(())
}
