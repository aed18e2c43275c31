//! Wall-clock scaling of the RAD-Conv forward pass.
//!
//! `r` is the side of the pixel window each region reads: regions span
//! `[c - a, c - a + r - 1]` on both axes with integer boundaries, where `c`
//! is the element centre and `a = (r - 1) / 2` (a vanishing distance when
//! `a = 0`). Each interior region then touches exactly `r * r` pixels;
//! `r >= 2`.

use std::io::Write;
use std::time::{Duration, Instant};

use crate::analyzer::{complexity_estimate, ComplexitySizes, OperatorId};
use crate::error::{Error, Result};
use crate::numerics::FeatureMap;
use crate::ops::{
    radconv_forward, GroupWeights, KernelGrid, ModulationField, OffsetField, OffsetTransform, RadConvParams,
};
use crate::rng::XorShift64Star;

/// Stands in for a zero distance: below the spacing of doubles near any
/// centre coordinate >= 1, so the boundary lands on the centre itself.
const VANISHING: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchCase {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    /// Kernel side; `K = kernel^2`.
    pub kernel: usize,
    pub r: usize,
}

impl BenchCase {
    pub fn k(&self) -> usize {
        self.kernel * self.kernel
    }

    pub fn predicted_ops(&self) -> u128 {
        let sizes = ComplexitySizes {
            n: (self.height * self.width) as u64,
            k: self.k() as u64,
            r: self.r as u64,
            d: self.channels as u64,
            w: self.kernel as u64,
        };
        complexity_estimate(OperatorId::RadConv, sizes).count
    }
}

/// Raw offsets for windows of pixel side `r`.
pub fn window_offsets(params: &RadConvParams, height: usize, width: usize, r: usize) -> Result<OffsetField> {
    if r < 2 {
        return Err(Error::arg("window side must be at least 2"));
    }
    let a = ((r - 1) / 2) as f64;
    let near = if a == 0.0 { VANISHING } else { a };
    let far = (r - 1) as f64 - a;
    let far = if far == 0.0 { VANISHING } else { far };
    let t = params.offset_transform;
    let (oh, ow) = params.output_size(height, width);
    let mut off = OffsetField::zeros(params.groups, params.k(), oh, ow);
    let k = params.k();
    for g in 0..params.groups {
        for kk in 0..k {
            for (side, d) in [near, far, near, far].into_iter().enumerate() {
                let plane = off.map_mut().plane_mut((g * k + kk) * 4 + side);
                plane.fill(t.inverse(d));
            }
        }
    }
    Ok(off)
}

/// Median forward time over `repeats` runs, after one warm-up run.
pub fn time_radconv(case: &BenchCase, repeats: usize, seed: u64) -> Result<Duration> {
    if repeats == 0 {
        return Err(Error::arg("repeats must be positive"));
    }
    let params = RadConvParams::new(KernelGrid::square(case.kernel)?).with_transform(OffsetTransform::Exponential);
    let mut rng = XorShift64Star::new(seed);
    let x = FeatureMap::from_fn(case.channels, case.height, case.width, |_, _, _| rng.uniform(-1.0, 1.0))?;
    let mut w = GroupWeights::zeros(1, case.channels);
    rng.fill_uniform(w.data_mut(), -1.0, 1.0);
    let off = window_offsets(&params, case.height, case.width, case.r)?;
    let modu = ModulationField::zeros(1, params.k(), case.height, case.width);
    radconv_forward(&x, &w, &off, &modu, &params)?;
    let mut times = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let t = Instant::now();
        let y = radconv_forward(&x, &w, &off, &modu, &params)?;
        times.push(t.elapsed());
        std::hint::black_box(y);
    }
    times.sort();
    Ok(times[repeats / 2])
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len()) as f64;
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    /// `"k"` or `"r"`: which size this row varies.
    pub sweep: &'static str,
    pub case: BenchCase,
    pub median: Duration,
}

/// Timings of a K sweep at fixed `r` and an R sweep at fixed kernel side,
/// with the log-log slope of each.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<BenchRow>,
    pub k_slope: f64,
    pub r_slope: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub shape: (usize, usize, usize),
    /// Kernel sides of the K sweep.
    pub kernels: Vec<usize>,
    /// Window sides of the R sweep.
    pub regions: Vec<usize>,
    pub fixed_r: usize,
    pub fixed_kernel: usize,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for SweepPlan {
    fn default() -> Self {
        Self {
            shape: (8, 32, 32),
            kernels: vec![1, 3, 5],
            regions: vec![2, 4, 8],
            fixed_r: 4,
            fixed_kernel: 3,
            repeats: 7,
            seed: 0,
        }
    }
}

pub fn run_sweeps(plan: &SweepPlan) -> Result<SweepResult> {
    if plan.kernels.len() < 2 || plan.regions.len() < 2 {
        return Err(Error::arg("each sweep needs at least two sizes"));
    }
    let (channels, height, width) = plan.shape;
    let mut rows = Vec::new();
    let mut time = |sweep, kernel, r| -> Result<f64> {
        let case = BenchCase {
            channels,
            height,
            width,
            kernel,
            r,
        };
        let median = time_radconv(&case, plan.repeats, plan.seed)?;
        rows.push(BenchRow { sweep, case, median });
        Ok(median.as_secs_f64())
    };
    let mut k_times = Vec::new();
    for &kernel in &plan.kernels {
        k_times.push(time("k", kernel, plan.fixed_r)?);
    }
    let mut r_times = Vec::new();
    for &r in &plan.regions {
        r_times.push(time("r", plan.fixed_kernel, r)?);
    }
    let ks: Vec<f64> = plan.kernels.iter().map(|&k| (k * k) as f64).collect();
    let rs: Vec<f64> = plan.regions.iter().map(|&r| r as f64).collect();
    Ok(SweepResult {
        k_slope: loglog_slope(&ks, &k_times),
        r_slope: loglog_slope(&rs, &r_times),
        rows,
    })
}

pub fn write_bench_csv<W: Write>(out: W, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "sweep",
        "channels",
        "height",
        "width",
        "k",
        "r",
        "median_ns",
        "predicted_ops",
    ])?;
    for row in rows {
        let c = row.case;
        w.write_record([
            row.sweep.to_string(),
            c.channels.to_string(),
            c.height.to_string(),
            c.width.to_string(),
            c.k().to_string(),
            c.r.to_string(),
            row.median.as_nanos().to_string(),
            c.predicted_ops().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyzer::{footprint, OperatorConfig};

    #[test]
    fn windows_touch_r_squared_pixels() {
        for r in [2, 3, 4, 8] {
            let params = RadConvParams::new(KernelGrid::square(3).unwrap());
            let off = window_offsets(&params, 20, 20, r).unwrap();
            let rep = footprint(
                &OperatorConfig::RadConv {
                    params: &params,
                    offsets: &off,
                },
                20,
                20,
                10,
                10,
            )
            .unwrap();
            for reg in &rep.regions {
                assert!((reg.width() - (r as f64 - 1.0)).abs() < 1e-12);
                assert_eq!(reg.top().fract(), 0.0);
            }
            let single = RadConvParams::new(KernelGrid::pointwise());
            let off1 = window_offsets(&single, 20, 20, r).unwrap();
            let rep1 = footprint(
                &OperatorConfig::RadConv {
                    params: &single,
                    offsets: &off1,
                },
                20,
                20,
                10,
                10,
            )
            .unwrap();
            assert_eq!(rep1.count(), r * r, "r = {r}");
        }
        assert!(window_offsets(&RadConvParams::new(KernelGrid::pointwise()), 4, 4, 1).is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 3.0, 9.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 5.0 * x.powf(1.7)).collect();
        assert!((loglog_slope(&xs, &ys) - 1.7).abs() < 1e-12);
    }

    #[test]
    fn zero_repeats_is_an_error() {
        let case = BenchCase {
            channels: 1,
            height: 4,
            width: 4,
            kernel: 1,
            r: 2,
        };
        assert!(time_radconv(&case, 0, 0).is_err());
    }

    #[test]
    fn sweep_rows_and_csv() {
        let plan = SweepPlan {
            shape: (1, 8, 8),
            kernels: vec![1, 3],
            regions: vec![2, 3],
            repeats: 1,
            ..SweepPlan::default()
        };
        let res = run_sweeps(&plan).unwrap();
        assert_eq!(res.rows.len(), 4);
        assert!(res.k_slope.is_finite() && res.r_slope.is_finite());
        let mut buf = Vec::new();
        write_bench_csv(&mut buf, &res.rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("sweep,channels,height,width,k,r,median_ns,predicted_ops\n"));
        assert!(text.lines().nth(2).unwrap().starts_with("k,1,8,8,9,4,"));
        assert!(run_sweeps(&SweepPlan {
            kernels: vec![3],
            ..plan
        })
        .is_err());
    }
}
