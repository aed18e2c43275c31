//! Dense feature maps, continuous bilinear sampling, and the closed-form
//! one-dimensional tent integrals that region integration is built from.
//!
//! Coordinates are in pixel units with pixel centers at integers: `x` runs
//! along the width axis (columns) and `y` along the height axis (rows).
//! Samples outside `[0, W-1] x [0, H-1]` read as zero.

mod dump;
mod feature_map;
mod tent;

pub use dump::{read_dump, write_dump, DUMP_MAGIC, DUMP_VERSION};
pub use feature_map::{bilinear_sample, ContinuousPoint, FeatureMap};
pub(crate) use feature_map::{bilinear_taps, bilinear_unchecked};
pub use tent::{tent_boundary_value, tent_integral, AxisWeights, Interval};
