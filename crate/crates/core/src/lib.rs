//! Region-aware deformable convolution (RAD-Conv) and the convolution
//! family it generalises, on dense `f64` feature maps.
//!
//! Each kernel element of a RAD-Conv layer owns an axis-aligned rectangle,
//! decoded from four positive boundary distances, and contributes the exact
//! mean of the bilinearly interpolated input over that rectangle. Forward
//! and backward passes are closed-form; [`harness`] checks them against
//! finite differences and [`region::quadrature_oracle`] checks the
//! integrals against brute-force quadrature.
//!
//! Module map:
//!
//! - [`numerics`]: feature maps, bilinear sampling, tent integrals, `RADT` dumps
//! - [`region`]: region averages and their gradients
//! - [`ops`]: standard conv, DCN v1 to v4, RAD-Conv forward/backward, offset predictor
//! - [`analyzer`]: footprints, complexity estimates, operator taxonomy
//! - [`harness`]: quadrature oracle runs, gradient checks, synthetic region-recovery training
//! - [`cli`]: the `radconv` command-line front end
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod analyzer;
pub mod cli;
mod error;
pub mod harness;
pub mod numerics;
pub mod ops;
pub mod region;
pub mod rng;

pub use error::{Error, Result};
pub use numerics::{bilinear_sample, ContinuousPoint, FeatureMap, Interval};
pub use region::{region_average, region_average_backward, Region, RegionGradient};
