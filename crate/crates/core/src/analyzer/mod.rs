//! Window-size, reach and cost analysis for the operator family.

mod complexity;
mod footprint;
mod render;
mod taxonomy;

pub use complexity::{complexity_estimate, ComplexityEstimate, ComplexitySizes};
pub use footprint::{footprint, probe_footprint, BoundingBox, FootprintReport, OperatorConfig};
pub use render::{write_footprint_csv, write_footprint_svg, write_taxonomy_csv};
pub use taxonomy::{taxonomy_table, Aggregation, OperatorId, TaxonomyRow, WindowClass};
