use super::args::{BenchArgs, FootprintArgs, GradcheckArgs, OracleArgs, RegionMode, TaxonomyArgs, TrainArgs};
use super::bench::{run_sweeps, write_bench_csv, SweepPlan};
use super::output::{check_input, check_output, emit, read_map, write_atomic};
use super::Outcome;
use crate::analyzer::{
    footprint, taxonomy_table, write_footprint_csv, write_footprint_svg, write_taxonomy_csv, ComplexitySizes,
    FootprintReport, OperatorConfig, OperatorId,
};
use crate::error::{Error, Result};
use crate::harness::{
    finite_diff_gradcheck_with, make_region_task, oracle_suite, train_toy, write_gradcheck_csv, write_loss_csv,
    write_oracle_csv, TrainConfig,
};
use crate::numerics::write_dump;
use crate::ops::{KernelGrid, OffsetField, PointOffsetField, RadConvParams};
use crate::rng::XorShift64Star;

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::arg(format!("--{name} must be positive and finite, got {v}")))
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn gradcheck(a: &GradcheckArgs) -> Result<Outcome> {
    positive("tolerance", a.tolerance)?;
    check_output(a.out.as_deref())?;
    let params = RadConvParams::new(KernelGrid::square(a.kernel)?)
        .with_groups(a.groups)
        .with_transform(a.transform)
        .with_modulation(a.modulation)
        .with_stride(a.stride)
        .with_epsilon_min(a.epsilon_min);
    let report = finite_diff_gradcheck_with(a.seed, a.shape.dims(), &params, a.h, a.negative_control)?;
    emit(a.out.as_deref(), |w| {
        write_gradcheck_csv(w, std::slice::from_ref(&report))
    })?;
    let ok = report.passes(a.tolerance);
    eprintln!("{report} tolerance={:e} {}", a.tolerance, verdict(ok));
    Ok(ok.into())
}

pub fn oracle(a: &OracleArgs) -> Result<Outcome> {
    positive("tolerance", a.tolerance)?;
    check_input(a.input.as_deref())?;
    check_output(a.out.as_deref())?;
    let input = a.input.as_deref().map(read_map).transpose()?;
    let trials = oracle_suite(a.trials, a.n, a.seed, a.shape.dims(), input.as_ref())?;
    emit(a.out.as_deref(), |w| write_oracle_csv(w, &trials))?;
    let ok = trials.iter().all(|t| t.deviation() < a.tolerance);
    let worst = trials.iter().map(|t| t.deviation()).fold(0.0, f64::max);
    eprintln!(
        "oracle trials={} n={} max_deviation={worst:.3e} tolerance={:e} {}",
        trials.len(),
        a.n,
        a.tolerance,
        verdict(ok)
    );
    Ok(ok.into())
}

/// Boundary distances of a region covering the whole map from centre `c`.
fn full_distances(c: f64, size: usize) -> (f64, f64) {
    let lo = (-0.5f64).min(c - 0.5);
    let hi = (size as f64 - 0.5).max(c + 0.5);
    (c - lo, hi - c)
}

fn radconv_offsets(a: &FootprintArgs, params: &RadConvParams, h: usize, w: usize) -> OffsetField {
    let k = params.k();
    let t = params.offset_transform;
    let mut off = OffsetField::zeros(params.groups, k, h, w);
    let mut rng = XorShift64Star::new(a.seed);
    for oy in 0..h {
        for ox in 0..w {
            for g in 0..params.groups {
                for (kk, d) in params.kernel.offsets().iter().enumerate() {
                    let sides = match a.region {
                        RegionMode::Random => [(); 4].map(|_| rng.uniform(0.25, 3.0)),
                        RegionMode::Unit => [1.0; 4],
                        RegionMode::Full => {
                            let (top, bottom) = full_distances((oy as i64 + d.dy) as f64, h);
                            let (left, right) = full_distances((ox as i64 + d.dx) as f64, w);
                            [top, bottom, left, right]
                        }
                    };
                    for (side, v) in sides.into_iter().enumerate() {
                        off.map_mut().set((g * k + kk) * 4 + side, oy, ox, t.inverse(v));
                    }
                }
            }
        }
    }
    off
}

enum Subject {
    Conv(KernelGrid),
    Dcn(KernelGrid, PointOffsetField),
    RadConv(RadConvParams, OffsetField),
}

pub fn footprint_cmd(a: &FootprintArgs) -> Result<Outcome> {
    let id: OperatorId = a.op.parse()?;
    let (h, w) = (a.shape.1, a.shape.2);
    check_input(a.input.as_deref())?;
    check_output(a.out.as_deref())?;
    check_output(a.svg.as_deref())?;
    if let Some(p) = a.at {
        if p.0 >= h || p.1 >= w {
            return Err(Error::arg(format!("--at {},{} outside {h}x{w}", p.0, p.1)));
        }
    }
    if a.groups == 0 {
        return Err(Error::arg("--groups must be positive"));
    }
    let input = a.input.as_deref().map(read_map).transpose()?;
    let subject = match id {
        OperatorId::StandardConv | OperatorId::LargeKernelConv => Subject::Conv(KernelGrid::square(a.kernel)?),
        OperatorId::Conv1x1 => Subject::Conv(KernelGrid::pointwise()),
        OperatorId::Dcn => {
            let grid = KernelGrid::square(a.kernel)?;
            let offsets = match input {
                Some(m) => PointOffsetField::new(m),
                None => {
                    let mut f = PointOffsetField::zeros(a.groups, grid.len(), h, w);
                    XorShift64Star::new(a.seed).fill_uniform(f.map_mut().data_mut(), -2.5, 2.5);
                    f
                }
            };
            Subject::Dcn(grid, offsets)
        }
        OperatorId::RadConv => {
            let params = RadConvParams::new(KernelGrid::square(a.kernel)?)
                .with_groups(a.groups)
                .with_transform(a.transform);
            let offsets = match input {
                Some(m) => OffsetField::new(m),
                None => radconv_offsets(a, &params, h, w),
            };
            Subject::RadConv(params, offsets)
        }
        OperatorId::GlobalAttention | OperatorId::LocalAttention => {
            return Err(Error::arg(format!("no footprint model for {id}")));
        }
    };
    let config = match &subject {
        Subject::Conv(grid) => OperatorConfig::Conv { grid, stride: 1 },
        Subject::Dcn(grid, offsets) => OperatorConfig::Dcn { grid, offsets },
        Subject::RadConv(params, offsets) => OperatorConfig::RadConv { params, offsets },
    };
    let positions: Vec<(usize, usize)> = match a.at {
        Some(p) => vec![(p.0, p.1)],
        None => (0..h).flat_map(|y| (0..w).map(move |x| (y, x))).collect(),
    };
    let reports = positions
        .iter()
        .map(|&(y, x)| footprint(&config, h, w, y, x))
        .collect::<Result<Vec<FootprintReport>>>()?;
    emit(a.out.as_deref(), |out| write_footprint_csv(out, &reports))?;
    if let Some(svg) = a.svg.as_deref() {
        let report = match a.at {
            Some(_) => reports[0].clone(),
            None => footprint(&config, h, w, h / 2, w / 2)?,
        };
        write_atomic(svg, |out| write_footprint_svg(out, &report, h, w))?;
    }
    let counts = reports.iter().map(FootprintReport::count);
    eprintln!(
        "footprint op={} positions={} min_count={} max_count={}",
        config.name(),
        reports.len(),
        counts.clone().min().unwrap_or(0),
        counts.max().unwrap_or(0)
    );
    Ok(Outcome::Pass)
}

pub fn taxonomy(a: &TaxonomyArgs) -> Result<Outcome> {
    check_output(a.out.as_deref())?;
    let sizes = ComplexitySizes {
        n: a.n,
        k: a.k,
        r: a.r,
        d: a.d,
        w: a.w,
    };
    emit(a.out.as_deref(), |w| {
        write_taxonomy_csv(w, &taxonomy_table(), Some(sizes))
    })?;
    Ok(Outcome::Pass)
}

pub fn bench(a: &BenchArgs) -> Result<Outcome> {
    if a.repeats == 0 {
        return Err(Error::arg("--repeats must be at least 1"));
    }
    check_output(a.out.as_deref())?;
    let mut rows = Vec::new();
    for shape in &a.shapes {
        let plan = SweepPlan {
            shape: shape.dims(),
            kernels: a.kernels.clone(),
            regions: a.regions.clone(),
            fixed_r: a.fixed_r,
            fixed_kernel: a.fixed_kernel,
            repeats: a.repeats,
            seed: a.seed,
        };
        let res = run_sweeps(&plan)?;
        let (c, h, w) = plan.shape;
        eprintln!(
            "bench shape={c}x{h}x{w} k_slope={:.3} r_slope={:.3}",
            res.k_slope, res.r_slope
        );
        rows.extend(res.rows);
    }
    emit(a.out.as_deref(), |w| write_bench_csv(w, &rows))?;
    Ok(Outcome::Pass)
}

pub fn train(a: &TrainArgs) -> Result<Outcome> {
    positive("target", a.target)?;
    check_output(a.out.as_deref())?;
    check_output(a.dump.as_deref())?;
    let task = make_region_task(a.seed, a.size, a.size)?;
    let cfg = TrainConfig {
        lr: a.lr,
        steps: a.steps,
        seed: a.seed,
        modulation: a.modulation,
        transform: a.transform,
    };
    let report = train_toy(&task, &cfg)?;
    emit(a.out.as_deref(), |w| write_loss_csv(w, &report))?;
    if let Some(path) = a.dump.as_deref() {
        write_atomic(path, |w| write_dump(w, report.offsets.map()))?;
    }
    eprintln!("{report}");
    if let Some(step) = report.diverged_at {
        eprintln!(
            "error: loss became non-finite at step {step} (lr {:e}); training diverged",
            a.lr
        );
        return Ok(Outcome::Fail);
    }
    let ok = report.loss_ratio() < a.target;
    eprintln!(
        "train-toy ratio={:.3e} target={:e} {}",
        report.loss_ratio(),
        a.target,
        verdict(ok)
    );
    Ok(ok.into())
}
