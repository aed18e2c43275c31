use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::FeatureMap;
use crate::ops::{
    radconv_backward_with_fault, radconv_forward, radconv_forward_at, GradientFault, GroupWeights, ModulationField,
    ModulationMode, OffsetField, RadConvParams,
};
use crate::rng::XorShift64Star;

/// Boundaries closer than this to an integer are redrawn: the region
/// average has a kink there and central differences lose an order.
const KINK_MARGIN: f64 = 1e-3;

/// Relative-error floor for the denominator.
const DENOM_FLOOR: f64 = 1e-8;

/// Deliberate backward defects used to prove the check can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegativeControl {
    #[default]
    None,
    /// Negates the right-boundary gradient.
    FlipRight,
}

impl FromStr for NegativeControl {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(NegativeControl::None),
            "flip-right" => Ok(NegativeControl::FlipRight),
            _ => Err(Error::Argument(format!("unknown negative control '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassErrors {
    pub input: f64,
    pub weights: f64,
    pub offsets: f64,
    pub modulation: f64,
}

impl ClassErrors {
    pub fn max(&self) -> f64 {
        self.input.max(self.weights).max(self.offsets).max(self.modulation)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> {
        [
            ("input", self.input),
            ("weights", self.weights),
            ("offsets", self.offsets),
            ("modulation", self.modulation),
        ]
        .into_iter()
    }
}

/// Analytic versus central-difference gradients of `sum(y)`.
///
/// `normwise` compares each class as a vector,
/// `max|a - n| / max(max|a|, max|n|, 1e-8)`, and is the pass criterion.
/// `elementwise` is the largest per-entry `|a - n| / max(|a|, |n|, 1e-8)`;
/// it is reported for inspection only, since entries with tiny gradients
/// sit at the finite-difference noise floor.
#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub seed: u64,
    pub shape: (usize, usize, usize),
    pub h: f64,
    pub normwise: ClassErrors,
    pub elementwise: ClassErrors,
}

impl GradCheckReport {
    pub fn max_error(&self) -> f64 {
        self.normwise.max()
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_error() < tolerance
    }
}

impl fmt::Display for GradCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (c, h, w) = self.shape;
        write!(f, "gradcheck seed={} shape={c}x{h}x{w} h={:e}", self.seed, self.h)?;
        for (name, e) in self.normwise.iter() {
            write!(f, " {name}={e:.3e}")?;
        }
        Ok(())
    }
}

struct Instance {
    x: FeatureMap,
    w: GroupWeights,
    offsets: OffsetField,
    modulation: ModulationField,
}

fn draw_distance(rng: &mut XorShift64Star) -> f64 {
    loop {
        let d: f64 = rng.uniform(0.5, 2.5);
        let frac = d - d.floor();
        // Centres are integers, so the boundary sits near an integer iff d does.
        if frac > KINK_MARGIN && frac < 1.0 - KINK_MARGIN {
            return d;
        }
    }
}

fn make_instance(seed: u64, shape: (usize, usize, usize), params: &RadConvParams) -> Result<Instance> {
    let (c, h, w) = shape;
    params.validate(c)?;
    if h == 0 || w == 0 {
        return Err(Error::shape("empty spatial shape"));
    }
    let mut rng = XorShift64Star::new(seed);
    let x = FeatureMap::from_fn(c, h, w, |_, _, _| rng.uniform(-1.0, 1.0))?;
    let cg = c / params.groups;
    let mut wd = GroupWeights::zeros(params.groups, cg);
    for v in wd.data_mut() {
        let sign = if rng.below(2) == 0 { -1.0 } else { 1.0 };
        *v = sign * rng.uniform(0.25, 1.0);
    }
    let (oh, ow) = params.output_size(h, w);
    let mut offsets = OffsetField::zeros(params.groups, params.k(), oh, ow);
    for v in offsets.map_mut().data_mut() {
        *v = params.offset_transform.inverse(draw_distance(&mut rng));
    }
    let mut modulation = ModulationField::zeros(params.groups, params.k(), oh, ow);
    let (lo, hi) = match params.modulation {
        ModulationMode::None => (0.25, 1.25),
        _ => (-1.0, 1.0),
    };
    rng.fill_uniform(modulation.map_mut().data_mut(), lo, hi);
    Ok(Instance {
        x,
        w: wd,
        offsets,
        modulation,
    })
}

fn errors(analytic: &[f64], numeric: &[f64]) -> (f64, f64) {
    let mut diff = 0.0_f64;
    let mut scale = DENOM_FLOOR;
    let mut elem = 0.0_f64;
    for (a, n) in analytic.iter().zip(numeric) {
        let d = (a - n).abs();
        diff = diff.max(d);
        scale = scale.max(a.abs()).max(n.abs());
        elem = elem.max(d / a.abs().max(n.abs()).max(DENOM_FLOOR));
    }
    (diff / scale, elem)
}

/// Sum over outputs of `(y+ - y-) / 2h`, pairing outputs before summing.
fn paired_slope(plus: &[f64], minus: &[f64], h: f64) -> f64 {
    plus.iter().zip(minus).map(|(p, m)| p - m).sum::<f64>() / (2.0 * h)
}

pub fn finite_diff_gradcheck(
    seed: u64,
    shape: (usize, usize, usize),
    params: &RadConvParams,
    h: f64,
) -> Result<GradCheckReport> {
    finite_diff_gradcheck_with(seed, shape, params, h, NegativeControl::None)
}

pub fn finite_diff_gradcheck_with(
    seed: u64,
    shape: (usize, usize, usize),
    params: &RadConvParams,
    h: f64,
    control: NegativeControl,
) -> Result<GradCheckReport> {
    if !(1e-7..=1e-3).contains(&h) {
        return Err(Error::arg(format!("step {h} outside [1e-7, 1e-3]")));
    }
    let inst = make_instance(seed, shape, params)?;
    let y = radconv_forward(&inst.x, &inst.w, &inst.offsets, &inst.modulation, params)?;
    let upstream = FeatureMap::filled(y.channels(), y.height(), y.width(), 1.0);
    let fault = match control {
        NegativeControl::None => GradientFault::None,
        NegativeControl::FlipRight => GradientFault::FlipRight,
    };
    let grads = radconv_backward_with_fault(
        &inst.x,
        &inst.w,
        &inst.offsets,
        &inst.modulation,
        params,
        &upstream,
        fault,
    )?;

    let full = |x: &FeatureMap, w: &GroupWeights| radconv_forward(x, w, &inst.offsets, &inst.modulation, params);

    let num_input: Vec<f64> = (0..inst.x.len())
        .into_par_iter()
        .map(|i| {
            let mut x = inst.x.clone();
            x.data_mut()[i] += h;
            let plus = full(&x, &inst.w)?;
            x.data_mut()[i] = inst.x.data()[i] - h;
            let minus = full(&x, &inst.w)?;
            Ok(paired_slope(plus.data(), minus.data(), h))
        })
        .collect::<Result<_>>()?;

    let num_weights: Vec<f64> = (0..inst.w.data().len())
        .into_par_iter()
        .map(|i| {
            let mut w = inst.w.clone();
            w.data_mut()[i] += h;
            let plus = full(&inst.x, &w)?;
            w.data_mut()[i] = inst.w.data()[i] - h;
            let minus = full(&inst.x, &w)?;
            Ok(paired_slope(plus.data(), minus.data(), h))
        })
        .collect::<Result<_>>()?;

    // Offsets and logits only move their own output position.
    let plane = inst.offsets.map().height() * inst.offsets.map().width();
    let ow = inst.offsets.map().width();
    let num_offsets: Vec<f64> = (0..inst.offsets.map().len())
        .into_par_iter()
        .map(|i| {
            let pos = i % plane;
            let (oy, ox) = (pos / ow, pos % ow);
            let mut off = inst.offsets.clone();
            off.map_mut().data_mut()[i] += h;
            let plus = radconv_forward_at(&inst.x, &inst.w, &off, &inst.modulation, params, oy, ox)?;
            off.map_mut().data_mut()[i] = inst.offsets.map().data()[i] - h;
            let minus = radconv_forward_at(&inst.x, &inst.w, &off, &inst.modulation, params, oy, ox)?;
            Ok(paired_slope(&plus, &minus, h))
        })
        .collect::<Result<_>>()?;

    let num_modulation: Vec<f64> = (0..inst.modulation.map().len())
        .into_par_iter()
        .map(|i| {
            let pos = i % plane;
            let (oy, ox) = (pos / ow, pos % ow);
            let mut m = inst.modulation.clone();
            m.map_mut().data_mut()[i] += h;
            let plus = radconv_forward_at(&inst.x, &inst.w, &inst.offsets, &m, params, oy, ox)?;
            m.map_mut().data_mut()[i] = inst.modulation.map().data()[i] - h;
            let minus = radconv_forward_at(&inst.x, &inst.w, &inst.offsets, &m, params, oy, ox)?;
            Ok(paired_slope(&plus, &minus, h))
        })
        .collect::<Result<_>>()?;

    let (ni, ei) = errors(grads.grad_x.data(), &num_input);
    let (nw, ew) = errors(grads.grad_w.data(), &num_weights);
    let (no, eo) = errors(grads.grad_offsets.map().data(), &num_offsets);
    let (nm, em) = errors(grads.grad_modulation.map().data(), &num_modulation);
    Ok(GradCheckReport {
        seed,
        shape,
        h,
        normwise: ClassErrors {
            input: ni,
            weights: nw,
            offsets: no,
            modulation: nm,
        },
        elementwise: ClassErrors {
            input: ei,
            weights: ew,
            offsets: eo,
            modulation: em,
        },
    })
}

/// One row per parameter class.
pub fn write_gradcheck_csv<W: Write>(out: W, reports: &[GradCheckReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "seed",
        "shape",
        "h",
        "class",
        "normwise_rel_error",
        "elementwise_rel_error",
    ])?;
    for r in reports {
        let (c, hh, ww) = r.shape;
        for ((name, n), (_, e)) in r.normwise.iter().zip(r.elementwise.iter()) {
            w.write_record([
                r.seed.to_string(),
                format!("{c}x{hh}x{ww}"),
                format!("{:e}", r.h),
                name.to_string(),
                format!("{n:e}"),
                format!("{e:e}"),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{KernelGrid, OffsetTransform};

    #[test]
    fn seed_zero_single_channel_3x3_passes() {
        let params = RadConvParams::new(KernelGrid::square(3).unwrap());
        let r = finite_diff_gradcheck(0, (1, 8, 8), &params, 1e-5).unwrap();
        assert!(r.passes(1e-6), "{r}");
        assert!(r.normwise.iter().all(|(_, e)| e.is_finite() && e >= 0.0));
    }

    #[test]
    fn all_modes_and_transforms_pass_on_two_groups() {
        for t in [OffsetTransform::Exponential, OffsetTransform::Softplus] {
            for m in [
                ModulationMode::Sigmoid,
                ModulationMode::SoftmaxOverK,
                ModulationMode::None,
            ] {
                let params = RadConvParams::new(KernelGrid::square(3).unwrap())
                    .with_groups(2)
                    .with_transform(t)
                    .with_modulation(m);
                let r = finite_diff_gradcheck(3, (2, 6, 6), &params, 1e-5).unwrap();
                assert!(r.passes(1e-6), "{t:?} {m:?}: {r}");
            }
        }
    }

    #[test]
    fn stride_two_passes() {
        let params = RadConvParams::new(KernelGrid::square(3).unwrap()).with_stride(2);
        let r = finite_diff_gradcheck(4, (1, 7, 7), &params, 1e-5).unwrap();
        assert!(r.passes(1e-6), "{r}");
    }

    #[test]
    fn clamped_regions_pass() {
        // Distances near 0.5 with a wide minimum extent keep every region clamped.
        let params = RadConvParams::new(KernelGrid::pointwise()).with_epsilon_min(1.7);
        let r = finite_diff_gradcheck(5, (1, 6, 6), &params, 1e-5).unwrap();
        assert!(r.normwise.offsets < 1e-6, "{r}");
    }

    #[test]
    fn flipped_right_gradient_is_caught() {
        let params = RadConvParams::new(KernelGrid::square(3).unwrap());
        let r = finite_diff_gradcheck_with(0, (1, 8, 8), &params, 1e-5, NegativeControl::FlipRight).unwrap();
        assert!(r.normwise.offsets > 1e-2, "{r}");
        assert!(r.normwise.input < 1e-6);
    }

    #[test]
    fn step_range_is_enforced() {
        let params = RadConvParams::new(KernelGrid::pointwise());
        assert!(finite_diff_gradcheck(0, (1, 4, 4), &params, 1e-2).is_err());
        assert!(finite_diff_gradcheck(0, (1, 4, 4), &params, 1e-8).is_err());
    }

    #[test]
    fn csv_lists_four_classes() {
        let params = RadConvParams::new(KernelGrid::pointwise());
        let r = finite_diff_gradcheck(1, (1, 4, 4), &params, 1e-5).unwrap();
        let mut buf = Vec::new();
        write_gradcheck_csv(&mut buf, &[r]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("seed,shape,h,class,"));
    }

    #[test]
    fn control_parses() {
        assert_eq!(
            "flip-right".parse::<NegativeControl>().unwrap(),
            NegativeControl::FlipRight
        );
        assert!("flip-left".parse::<NegativeControl>().is_err());
    }
}
