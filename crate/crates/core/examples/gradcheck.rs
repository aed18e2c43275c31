//! Finite-difference gradient checks across transforms and modulation
//! modes, plus the negative control that must fail.

use radconv::harness::{finite_diff_gradcheck, finite_diff_gradcheck_with, NegativeControl};
use radconv::ops::{KernelGrid, ModulationMode, OffsetTransform, RadConvParams};

fn main() -> radconv::Result<()> {
    for transform in [OffsetTransform::Exponential, OffsetTransform::Softplus] {
        for modulation in [
            ModulationMode::Sigmoid,
            ModulationMode::SoftmaxOverK,
            ModulationMode::None,
        ] {
            let params = RadConvParams::new(KernelGrid::square(3)?)
                .with_groups(2)
                .with_transform(transform)
                .with_modulation(modulation);
            let report = finite_diff_gradcheck(0, (2, 6, 6), &params, 1e-5)?;
            println!("{:>8} {:>7}: {report}", transform.name(), modulation.name());
        }
    }
    let params = RadConvParams::new(KernelGrid::square(3)?);
    let broken = finite_diff_gradcheck_with(0, (1, 6, 6), &params, 1e-5, NegativeControl::FlipRight)?;
    println!("flip-right control: {broken}");
    Ok(())
}
