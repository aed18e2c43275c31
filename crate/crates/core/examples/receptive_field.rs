//! Footprints of conv, DCN and RAD-Conv at one output position, with an SVG
//! of the RAD-Conv case written to the system temp directory.

use radconv::analyzer::{footprint, write_footprint_svg, OperatorConfig};
use radconv::ops::{KernelGrid, OffsetField, OffsetTransform, PointOffsetField, RadConvParams};
use radconv::rng::XorShift64Star;

fn main() -> radconv::Result<()> {
    let (h, w, oy, ox) = (12, 12, 6, 6);
    let grid = KernelGrid::square(3)?;
    let k = grid.len();
    let mut rng = XorShift64Star::new(8);

    let conv = footprint(&OperatorConfig::Conv { grid: &grid, stride: 1 }, h, w, oy, ox)?;
    let mut points = PointOffsetField::zeros(1, k, h, w);
    rng.fill_uniform(points.map_mut().data_mut(), -3.0, 3.0);
    let dcn = footprint(
        &OperatorConfig::Dcn {
            grid: &grid,
            offsets: &points,
        },
        h,
        w,
        oy,
        ox,
    )?;

    let params = RadConvParams::new(grid.clone());
    let mut raw = OffsetField::zeros(1, k, h, w);
    for v in raw.map_mut().data_mut() {
        *v = OffsetTransform::Exponential.inverse(rng.uniform(0.3, 2.5));
    }
    let rad = footprint(
        &OperatorConfig::RadConv {
            params: &params,
            offsets: &raw,
        },
        h,
        w,
        oy,
        ox,
    )?;

    for rep in [&conv, &dcn, &rad] {
        let b = rep.bounding_box().expect("non-empty footprint");
        println!(
            "{:>8}: {:3} pixels, rows {}..={}, cols {}..={}",
            rep.operator,
            rep.count(),
            b.y_min,
            b.y_max,
            b.x_min,
            b.x_max
        );
    }
    let path = std::env::temp_dir().join("radconv_footprint.svg");
    write_footprint_svg(std::fs::File::create(&path)?, &rad, h, w)?;
    println!("svg: {}", path.display());
    Ok(())
}
