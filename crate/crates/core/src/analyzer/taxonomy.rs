use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperatorId {
    GlobalAttention,
    LocalAttention,
    LargeKernelConv,
    Conv1x1,
    StandardConv,
    Dcn,
    RadConv,
}

impl OperatorId {
    pub fn name(self) -> &'static str {
        match self {
            OperatorId::GlobalAttention => "global-attention",
            OperatorId::LocalAttention => "local-attention",
            OperatorId::LargeKernelConv => "large-kernel-conv",
            OperatorId::Conv1x1 => "conv1x1",
            OperatorId::StandardConv => "conv",
            OperatorId::Dcn => "dcn",
            OperatorId::RadConv => "radconv",
        }
    }
}

impl fmt::Display for OperatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperatorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s {
            "global-attention" => OperatorId::GlobalAttention,
            "local-attention" => OperatorId::LocalAttention,
            "large-kernel-conv" => OperatorId::LargeKernelConv,
            "conv1x1" => OperatorId::Conv1x1,
            "conv" => OperatorId::StandardConv,
            "dcn" | "dcnv1" | "dcnv2" | "dcnv3" | "dcnv4" => OperatorId::Dcn,
            "radconv" => OperatorId::RadConv,
            _ => return Err(Error::Argument(format!("unknown operator '{s}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowClass {
    Bounded,
    AdaptivelyBounded,
    Unbounded,
}

impl WindowClass {
    pub fn name(self) -> &'static str {
        match self {
            WindowClass::Bounded => "bounded",
            WindowClass::AdaptivelyBounded => "adaptively-bounded",
            WindowClass::Unbounded => "unbounded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    Fixed,
    Adaptive,
}

impl Aggregation {
    pub fn name(self) -> &'static str {
        match self {
            Aggregation::Fixed => "fixed",
            Aggregation::Adaptive => "adaptive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaxonomyRow {
    pub operator: OperatorId,
    pub window: WindowClass,
    /// Pixels read per output, as a formula.
    pub window_size: &'static str,
    pub long_range: bool,
    pub aggregation: Aggregation,
    pub complexity: &'static str,
}

/// One row per operator class in the comparison figure.
pub fn taxonomy_table() -> Vec<TaxonomyRow> {
    use Aggregation::*;
    use WindowClass::*;
    let row = |operator, window, window_size, long_range, aggregation, complexity| TaxonomyRow {
        operator,
        window,
        window_size,
        long_range,
        aggregation,
        complexity,
    };
    vec![
        row(OperatorId::GlobalAttention, Unbounded, "H*W", true, Adaptive, "N^2*d"),
        row(OperatorId::LocalAttention, Bounded, "w^2", false, Adaptive, "N*w^2*d"),
        row(OperatorId::LargeKernelConv, Bounded, "K", false, Fixed, "K*N"),
        row(OperatorId::Conv1x1, Bounded, "1", false, Fixed, "N"),
        row(OperatorId::Dcn, Bounded, "4K", true, Adaptive, "4*K*N"),
        row(OperatorId::RadConv, AdaptivelyBounded, "H*W", true, Adaptive, "K*N*R^2"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_rows_with_expected_classes() {
        let t = taxonomy_table();
        assert_eq!(t.len(), 6);
        let get = |id| *t.iter().find(|r| r.operator == id).unwrap();
        let c1 = get(OperatorId::Conv1x1);
        assert_eq!(
            (c1.window, c1.long_range, c1.aggregation),
            (WindowClass::Bounded, false, Aggregation::Fixed)
        );
        let dcn = get(OperatorId::Dcn);
        assert_eq!(
            (dcn.window, dcn.window_size, dcn.aggregation),
            (WindowClass::Bounded, "4K", Aggregation::Adaptive)
        );
        let rad = get(OperatorId::RadConv);
        assert_eq!((rad.window, rad.long_range), (WindowClass::AdaptivelyBounded, true));
        assert_eq!(get(OperatorId::GlobalAttention).window, WindowClass::Unbounded);
        assert!(!get(OperatorId::LocalAttention).long_range);
    }

    #[test]
    fn names_round_trip() {
        for row in taxonomy_table() {
            assert_eq!(row.operator.name().parse::<OperatorId>().unwrap(), row.operator);
        }
        assert_eq!("dcnv3".parse::<OperatorId>().unwrap(), OperatorId::Dcn);
        assert!("swin".parse::<OperatorId>().is_err());
    }
}
