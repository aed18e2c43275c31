//! The operator family: standard convolution, deformable convolution v1 to
//! v4 (forward references), and RAD-Conv with forward and backward passes.
//!
//! Field layouts, for `G` groups and `K` kernel elements:
//!
//! | field | channels | order |
//! |---|---|---|
//! | [`OffsetField`] | `G*4K` | `(g, k, [top, bottom, left, right])` |
//! | [`ModulationField`] | `G*K` | `(g, k)` |
//! | [`PointOffsetField`] | `G*2K` | `(g, k, [dx, dy])` |

mod conv;
mod dcn;
mod fields;
mod grid;
mod params;
mod predictor;
mod radconv;

pub use conv::{standard_conv_forward, standard_conv_forward_strided};
pub use dcn::{dcn_forward, DcnVariant};
pub use fields::{ConvWeights, GroupWeights, ModulationField, OffsetField, PointOffsetField};
pub use grid::{GridOffset, KernelGrid};
pub use params::{ModulationMode, OffsetTransform, RadConvParams};
pub use predictor::{predictor_conv, predictor_weights};
pub use radconv::{decode_regions, radconv_backward, radconv_forward, radconv_forward_at, RadConvGrads};

pub(crate) use radconv::{radconv_backward_with_fault, GradientFault};
