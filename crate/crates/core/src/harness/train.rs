use std::fmt;
use std::io::Write;

use super::SyntheticTask;
use crate::error::{Error, Result};
use crate::numerics::FeatureMap;
use crate::ops::{
    decode_regions, radconv_backward, radconv_forward, GroupWeights, KernelGrid, ModulationField, ModulationMode,
    OffsetField, OffsetTransform, RadConvParams,
};

/// Plain gradient descent on the raw boundary offsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub lr: f64,
    pub steps: usize,
    pub seed: u64,
    pub modulation: ModulationMode,
    pub transform: OffsetTransform,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 0.5,
            steps: 500,
            seed: 0,
            modulation: ModulationMode::SoftmaxOverK,
            transform: OffsetTransform::Softplus,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub seed: u64,
    /// Loss before the first step and after every completed step.
    pub losses: Vec<f64>,
    /// Mean absolute boundary error in pixels, over all sides and positions.
    pub initial_boundary_error: f64,
    pub boundary_error: f64,
    /// Step at which the loss or the offsets stopped being finite.
    pub diverged_at: Option<usize>,
    pub offsets: OffsetField,
}

impl TrainReport {
    pub fn initial_loss(&self) -> f64 {
        self.losses[0]
    }

    pub fn final_loss(&self) -> f64 {
        *self.losses.last().expect("losses always hold the initial value")
    }

    /// Final loss as a fraction of the initial loss.
    pub fn loss_ratio(&self) -> f64 {
        self.final_loss() / self.initial_loss()
    }
}

impl fmt::Display for TrainReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "train-toy seed={} steps={} initial_loss={:.6e} final_loss={:.6e} ratio={:.3e} boundary_error={:.4}",
            self.seed,
            self.losses.len() - 1,
            self.initial_loss(),
            self.final_loss(),
            self.loss_ratio(),
            self.boundary_error
        )?;
        if let Some(step) = self.diverged_at {
            write!(f, " diverged_at={step}")?;
        }
        Ok(())
    }
}

struct Model {
    params: RadConvParams,
    weights: GroupWeights,
    modulation: ModulationField,
}

/// One region per position whose modulated weight is exactly one.
fn model(task: &SyntheticTask, cfg: &TrainConfig) -> Model {
    let (c, h, w) = task.input.shape();
    let params = RadConvParams::new(KernelGrid::pointwise())
        .with_transform(cfg.transform)
        .with_modulation(cfg.modulation);
    let mut weights = GroupWeights::identity(1, c);
    let mut modulation = ModulationField::zeros(1, 1, h, w);
    match cfg.modulation {
        ModulationMode::SoftmaxOverK => {}
        ModulationMode::Sigmoid => weights.data_mut().iter_mut().for_each(|v| *v *= 2.0),
        ModulationMode::None => modulation.map_mut().data_mut().fill(1.0),
    }
    Model {
        params,
        weights,
        modulation,
    }
}

fn boundary_error(task: &SyntheticTask, offsets: &OffsetField, params: &RadConvParams) -> Result<f64> {
    let (h, w) = (task.height(), task.width());
    let mut total = 0.0;
    for y in 0..h {
        for x in 0..w {
            let r = decode_regions(offsets, params, y, x)?[0];
            let t = task.hidden_at(y, x);
            total += (r.top() - t.top()).abs()
                + (r.bottom() - t.bottom()).abs()
                + (r.left() - t.left()).abs()
                + (r.right() - t.right()).abs();
        }
    }
    Ok(total / (4 * h * w) as f64)
}

/// Squared error summed over positions and channels, and its output gradient.
fn loss_and_residual(y: &FeatureMap, targets: &FeatureMap) -> (f64, FeatureMap) {
    let mut grad = y.clone();
    let mut loss = 0.0;
    for (g, t) in grad.data_mut().iter_mut().zip(targets.data()) {
        let r = *g - t;
        loss += r * r;
        *g = 2.0 * r;
    }
    (loss, grad)
}

fn is_divergence(e: &Error) -> bool {
    matches!(e, Error::NonFinite(_))
}

/// Starts every position from the unit region (all distances 1) and runs
/// `cfg.steps` full-batch gradient steps.
pub fn train_toy(task: &SyntheticTask, cfg: &TrainConfig) -> Result<TrainReport> {
    if !(cfg.lr > 0.0) || !cfg.lr.is_finite() {
        return Err(Error::arg(format!("learning rate must be positive, got {}", cfg.lr)));
    }
    let (h, w) = (task.height(), task.width());
    let m = model(task, cfg);
    let mut offsets = OffsetField::zeros(1, 1, h, w);
    offsets.map_mut().data_mut().fill(cfg.transform.inverse(1.0));
    let initial_boundary_error = boundary_error(task, &offsets, &m.params)?;

    let mut losses = Vec::with_capacity(cfg.steps + 1);
    let mut diverged_at = None;
    for step in 0..=cfg.steps {
        let y = match radconv_forward(&task.input, &m.weights, &offsets, &m.modulation, &m.params) {
            Ok(y) => y,
            Err(e) if is_divergence(&e) => {
                losses.push(f64::NAN);
                diverged_at = Some(step);
                break;
            }
            Err(e) => return Err(e),
        };
        let (loss, residual) = loss_and_residual(&y, &task.targets);
        losses.push(loss);
        if !loss.is_finite() {
            diverged_at = Some(step);
            break;
        }
        if step == cfg.steps {
            break;
        }
        let grads = radconv_backward(&task.input, &m.weights, &offsets, &m.modulation, &m.params, &residual)?;
        for (o, g) in offsets
            .map_mut()
            .data_mut()
            .iter_mut()
            .zip(grads.grad_offsets.map().data())
        {
            *o -= cfg.lr * g;
        }
    }
    let boundary_error = match diverged_at {
        Some(_) => f64::NAN,
        None => boundary_error(task, &offsets, &m.params)?,
    };
    Ok(TrainReport {
        seed: cfg.seed,
        losses,
        initial_boundary_error,
        boundary_error,
        diverged_at,
        offsets,
    })
}

/// `step,loss` rows, starting at step 0.
pub fn write_loss_csv<W: Write>(out: W, report: &TrainReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "loss"])?;
    for (step, loss) in report.losses.iter().enumerate() {
        w.write_record([step.to_string(), format!("{loss:e}")])?;
    }
    w.flush()?;
    Ok(())
}
