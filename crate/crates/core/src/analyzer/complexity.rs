use super::OperatorId;

/// Problem sizes: output positions `n`, kernel elements `k`, region side
/// `r`, feature dimension `d`, attention window side `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexitySizes {
    pub n: u64,
    pub k: u64,
    pub r: u64,
    pub d: u64,
    pub w: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityEstimate {
    pub operator: OperatorId,
    pub expression: &'static str,
    pub count: u128,
}

/// Leading-term operation count. Attention rows are formula-only.
pub fn complexity_estimate(operator: OperatorId, s: ComplexitySizes) -> ComplexityEstimate {
    let (n, k, r, d, w) = (s.n as u128, s.k as u128, s.r as u128, s.d as u128, s.w as u128);
    let (expression, count) = match operator {
        OperatorId::GlobalAttention => ("N^2*d", n * n * d),
        OperatorId::LocalAttention => ("N*w^2*d", n * w * w * d),
        OperatorId::LargeKernelConv | OperatorId::StandardConv => ("K*N", k * n),
        OperatorId::Conv1x1 => ("N", n),
        OperatorId::Dcn => ("4*K*N", 4 * k * n),
        OperatorId::RadConv => ("K*N*R^2", k * n * r * r),
    };
    ComplexityEstimate {
        operator,
        expression,
        count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sizes(n: u64, k: u64, r: u64, d: u64) -> ComplexitySizes {
        ComplexitySizes { n, k, r, d, w: 7 }
    }

    #[test]
    fn radconv_and_global_attention_counts() {
        let s = sizes(196, 9, 5, 64);
        assert_eq!(complexity_estimate(OperatorId::RadConv, s).count, 9 * 196 * 25);
        assert_eq!(complexity_estimate(OperatorId::RadConv, s).count, 44_100);
        assert_eq!(complexity_estimate(OperatorId::GlobalAttention, s).count, 2_458_624);
        assert_eq!(complexity_estimate(OperatorId::LocalAttention, s).count, 196 * 49 * 64);
        assert_eq!(complexity_estimate(OperatorId::Dcn, s).count, 36 * 196);
    }

    #[test]
    fn large_sizes_do_not_overflow() {
        let s = sizes(u32::MAX as u64, 1, 1, 1 << 20);
        let c = complexity_estimate(OperatorId::GlobalAttention, s).count;
        assert_eq!(c, (u32::MAX as u128).pow(2) << 20);
    }

    #[test]
    fn radconv_cheaper_than_attention_iff_r2_below_nd_over_k() {
        for r in 1..40u64 {
            let s = sizes(196, 9, r, 64);
            let cheaper = complexity_estimate(OperatorId::RadConv, s).count
                < complexity_estimate(OperatorId::GlobalAttention, s).count;
            assert_eq!(cheaper, (r * r * 9) < 196 * 64);
        }
    }
}
