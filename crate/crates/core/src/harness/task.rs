use crate::error::{Error, Result};
use crate::numerics::FeatureMap;
use crate::region::{region_average, Region};
use crate::rng::XorShift64Star;

/// Input planes per task.
pub const TASK_CHANNELS: usize = 4;

/// Smallest distance from the output position to any hidden boundary.
const MIN_DISTANCE: f64 = 0.25;

/// Region recovery: find, per output position, the rectangle whose
/// average reproduces the target in every channel.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTask {
    pub seed: u64,
    pub input: FeatureMap,
    /// Row-major over output positions.
    pub hidden: Vec<Region>,
    pub targets: FeatureMap,
}

impl SyntheticTask {
    pub fn height(&self) -> usize {
        self.input.height()
    }

    pub fn width(&self) -> usize {
        self.input.width()
    }

    pub fn hidden_at(&self, y: usize, x: usize) -> Region {
        self.hidden[y * self.width() + x]
    }
}

/// Places an interval of length `extent` containing `p` with clearance,
/// inside the pixel-area domain `[-0.5, size - 0.5]`. Feasible whenever
/// `2 * MIN_DISTANCE <= extent <= size`.
fn place(rng: &mut XorShift64Star, p: f64, extent: f64, size: usize) -> f64 {
    let lo = (p - extent + MIN_DISTANCE).max(-0.5);
    let hi = (p - MIN_DISTANCE).min(size as f64 - 0.5 - extent);
    rng.uniform(lo, hi)
}

/// Smooth planes in pixel units: two ramps rising about one unit per pixel,
/// two bowls with random centre, and a faint low-frequency wave.
fn planes(rng: &mut XorShift64Star, h: usize, w: usize) -> Result<FeatureMap> {
    let s = (h.max(w) - 1) as f64;
    let coef: Vec<[f64; 5]> = (0..TASK_CHANNELS)
        .map(|_| {
            [
                rng.uniform(0.75, 1.25),
                rng.uniform(0.3, 0.7) * s,
                rng.uniform(0.1, 0.3),
                rng.uniform(0.0, std::f64::consts::TAU),
                rng.uniform(0.3, 0.6),
            ]
        })
        .collect();
    FeatureMap::from_fn(TASK_CHANNELS, h, w, |c, y, x| {
        let [a, ctr, wave, phase, freq] = coef[c];
        let (x, y) = (x as f64, y as f64);
        let base = match c {
            0 => x,
            1 => y,
            2 => (x - ctr).powi(2) / s,
            _ => (y - ctr).powi(2) / s,
        };
        a * base + 0.02 * s * wave * (freq * (x + y) + phase).sin()
    })
}

pub fn make_region_task(seed: u64, height: usize, width: usize) -> Result<SyntheticTask> {
    if height < 4 || width < 4 {
        return Err(Error::shape(format!("task needs H, W >= 4, got {height}x{width}")));
    }
    let mut rng = XorShift64Star::new(seed);
    let input = planes(&mut rng, height, width)?;
    let max_extent = (height.min(width) - 1) as f64;
    let mut hidden = Vec::with_capacity(height * width);
    let mut targets = FeatureMap::zeros(TASK_CHANNELS, height, width);
    for y in 0..height {
        for x in 0..width {
            let eh = rng.uniform(1.0, max_extent);
            let ew = rng.uniform(1.0, max_extent);
            let top = place(&mut rng, y as f64, eh, height);
            let left = place(&mut rng, x as f64, ew, width);
            let r = Region::new(top, top + eh, left, left + ew)?;
            for c in 0..TASK_CHANNELS {
                targets.set(c, y, x, region_average(&input, c, &r)?);
            }
            hidden.push(r);
        }
    }
    Ok(SyntheticTask {
        seed,
        input,
        hidden,
        targets,
    })
}
