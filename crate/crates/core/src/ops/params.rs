use super::KernelGrid;
use crate::error::{Error, Result};
use crate::region::DEFAULT_MIN_EXTENT;

/// Map from unconstrained logits to strictly positive boundary distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OffsetTransform {
    #[default]
    Exponential,
    /// `ln(1 + e^z)`; grows linearly for large logits instead of overflowing.
    Softplus,
}

impl OffsetTransform {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            OffsetTransform::Exponential => z.exp(),
            OffsetTransform::Softplus => z.max(0.0) + (-z.abs()).exp().ln_1p(),
        }
    }

    #[inline]
    pub fn derivative(self, z: f64) -> f64 {
        match self {
            OffsetTransform::Exponential => z.exp(),
            OffsetTransform::Softplus => sigmoid(z),
        }
    }

    /// Logit whose transform equals `delta > 0`.
    pub fn inverse(self, delta: f64) -> f64 {
        match self {
            OffsetTransform::Exponential => delta.ln(),
            // ln(e^d - 1) = d + ln(1 - e^-d)
            OffsetTransform::Softplus => delta + (-(-delta).exp_m1()).ln(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OffsetTransform::Exponential => "exp",
            OffsetTransform::Softplus => "softplus",
        }
    }
}

impl std::str::FromStr for OffsetTransform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp" | "exponential" => Ok(Self::Exponential),
            "softplus" => Ok(Self::Softplus),
            _ => Err(Error::arg(format!("unknown offset transform '{s}'"))),
        }
    }
}

#[inline]
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// How raw modulation logits become per-element scalars.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModulationMode {
    /// Independent `sigmoid(z)` per element.
    Sigmoid,
    /// `softmax` over the `K` elements of each group.
    #[default]
    SoftmaxOverK,
    /// Logits used as-is.
    None,
}

impl ModulationMode {
    /// Normalises the `K` logits of one group in place.
    pub fn apply(self, logits: &[f64], out: &mut [f64]) {
        match self {
            ModulationMode::Sigmoid => {
                for (o, &z) in out.iter_mut().zip(logits) {
                    *o = sigmoid(z);
                }
            }
            ModulationMode::SoftmaxOverK => {
                let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut sum = 0.0;
                for (o, &z) in out.iter_mut().zip(logits) {
                    *o = (z - max).exp();
                    sum += *o;
                }
                for o in out.iter_mut() {
                    *o /= sum;
                }
            }
            ModulationMode::None => out.copy_from_slice(logits),
        }
    }

    /// Pulls `d_m` (gradient w.r.t. the normalised values `m`) back to the
    /// logits.
    pub fn backward(self, m: &[f64], d_m: &[f64], d_logits: &mut [f64]) {
        match self {
            ModulationMode::Sigmoid => {
                for ((d, &mv), &g) in d_logits.iter_mut().zip(m).zip(d_m) {
                    *d = g * mv * (1.0 - mv);
                }
            }
            ModulationMode::SoftmaxOverK => {
                let dot: f64 = m.iter().zip(d_m).map(|(a, b)| a * b).sum();
                for ((d, &mv), &g) in d_logits.iter_mut().zip(m).zip(d_m) {
                    *d = mv * (g - dot);
                }
            }
            ModulationMode::None => d_logits.copy_from_slice(d_m),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModulationMode::Sigmoid => "sigmoid",
            ModulationMode::SoftmaxOverK => "softmax",
            ModulationMode::None => "none",
        }
    }
}

impl std::str::FromStr for ModulationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigmoid" => Ok(Self::Sigmoid),
            "softmax" | "softmax_over_k" => Ok(Self::SoftmaxOverK),
            "none" | "raw" => Ok(Self::None),
            _ => Err(Error::arg(format!("unknown modulation mode '{s}'"))),
        }
    }
}

/// Configuration of a RAD-Conv layer.
#[derive(Debug, Clone, PartialEq)]
pub struct RadConvParams {
    pub kernel: KernelGrid,
    pub groups: usize,
    pub offset_transform: OffsetTransform,
    pub modulation: ModulationMode,
    /// Regions thinner than this along either axis are widened to it.
    pub epsilon_min: f64,
    /// 1 or 2.
    pub stride: usize,
}

impl RadConvParams {
    /// One group, exponential offsets, softmax modulation, stride 1.
    pub fn new(kernel: KernelGrid) -> Self {
        Self {
            kernel,
            groups: 1,
            offset_transform: OffsetTransform::default(),
            modulation: ModulationMode::default(),
            epsilon_min: DEFAULT_MIN_EXTENT,
            stride: 1,
        }
    }

    pub fn with_groups(mut self, groups: usize) -> Self {
        self.groups = groups;
        self
    }

    pub fn with_transform(mut self, t: OffsetTransform) -> Self {
        self.offset_transform = t;
        self
    }

    pub fn with_modulation(mut self, m: ModulationMode) -> Self {
        self.modulation = m;
        self
    }

    pub fn with_epsilon_min(mut self, eps: f64) -> Self {
        self.epsilon_min = eps;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn k(&self) -> usize {
        self.kernel.len()
    }

    pub fn offset_channels(&self) -> usize {
        self.groups * 4 * self.k()
    }

    pub fn modulation_channels(&self) -> usize {
        self.groups * self.k()
    }

    /// Output spatial size for an `height x width` input.
    pub fn output_size(&self, height: usize, width: usize) -> (usize, usize) {
        ((height - 1) / self.stride + 1, (width - 1) / self.stride + 1)
    }

    pub fn validate(&self, channels: usize) -> Result<()> {
        if self.groups == 0 || !channels.is_multiple_of(self.groups) {
            return Err(Error::arg(format!(
                "{channels} channels not divisible into {} groups",
                self.groups
            )));
        }
        if !(self.epsilon_min > 0.0 && self.epsilon_min.is_finite()) {
            return Err(Error::arg("epsilon_min must be positive"));
        }
        if !matches!(self.stride, 1 | 2) {
            return Err(Error::arg(format!("stride must be 1 or 2, got {}", self.stride)));
        }
        Ok(())
    }
}
