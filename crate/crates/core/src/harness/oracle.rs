use std::io::Write;

use crate::error::{Error, Result};
use crate::numerics::FeatureMap;
use crate::region::{quadrature_oracle, region_average, Region};
use crate::rng::XorShift64Star;

/// Shortest side of a random trial region, in pixels.
const MIN_SIDE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleTrial {
    pub trial: usize,
    pub channel: usize,
    pub region: Region,
    pub exact: f64,
    pub quadrature: f64,
}

impl OracleTrial {
    pub fn deviation(&self) -> f64 {
        (self.exact - self.quadrature).abs()
    }
}

fn interior_span(rng: &mut XorShift64Star, size: usize) -> (f64, f64) {
    let hi = (size - 1) as f64;
    loop {
        let (a, b) = (rng.uniform(0.0, hi), rng.uniform(0.0, hi));
        let (lo, up) = (a.min(b), a.max(b));
        if up - lo >= MIN_SIDE {
            return (lo, up);
        }
    }
}

/// Closed-form region averages against `n x n` midpoint quadrature.
///
/// Each trial draws a region inside `[0, H-1] x [0, W-1]`. Without `input`
/// every trial gets a fresh uniform `[-1, 1)` plane of the given `H x W`;
/// with `input`, trials cycle through its channels.
pub fn oracle_suite(
    trials: usize,
    n: usize,
    seed: u64,
    shape: (usize, usize, usize),
    input: Option<&FeatureMap>,
) -> Result<Vec<OracleTrial>> {
    if trials == 0 {
        return Err(Error::arg("at least one trial is required"));
    }
    let (c, h, w) = input.map_or(shape, FeatureMap::shape);
    if c == 0 || h < 2 || w < 2 {
        return Err(Error::shape(format!(
            "oracle needs C >= 1 and H, W >= 2, got {c}x{h}x{w}"
        )));
    }
    let mut rng = XorShift64Star::new(seed);
    let mut out = Vec::with_capacity(trials);
    for trial in 0..trials {
        let fresh;
        let (map, channel) = match input {
            Some(m) => (m, trial % c),
            None => {
                fresh = FeatureMap::from_fn(1, h, w, |_, _, _| rng.uniform(-1.0, 1.0))?;
                (&fresh, 0)
            }
        };
        let (top, bottom) = interior_span(&mut rng, h);
        let (left, right) = interior_span(&mut rng, w);
        let region = Region::new(top, bottom, left, right)?;
        out.push(OracleTrial {
            trial,
            channel,
            region,
            exact: region_average(map, channel, &region)?,
            quadrature: quadrature_oracle(map, channel, &region, n)?,
        });
    }
    Ok(out)
}

pub fn write_oracle_csv<W: Write>(out: W, trials: &[OracleTrial]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let rows = std::iter::once(
        [
            "trial",
            "channel",
            "top",
            "bottom",
            "left",
            "right",
            "exact",
            "quadrature",
            "deviation",
        ]
        .map(String::from),
    )
    .chain(trials.iter().map(|t| {
        [
            t.trial.to_string(),
            t.channel.to_string(),
            t.region.top().to_string(),
            t.region.bottom().to_string(),
            t.region.left().to_string(),
            t.region.right().to_string(),
            t.exact.to_string(),
            t.quadrature.to_string(),
            t.deviation().to_string(),
        ]
    }));
    for rec in rows {
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regions_stay_inside_the_pixel_hull() {
        let trials = oracle_suite(50, 16, 3, (1, 6, 9), None).unwrap();
        for t in &trials {
            let r = t.region;
            assert!(r.top() >= 0.0 && r.bottom() <= 5.0 && r.left() >= 0.0 && r.right() <= 8.0);
            assert!(r.width() >= MIN_SIDE && r.height() >= MIN_SIDE);
        }
    }

    #[test]
    fn constant_input_gives_zero_deviation_at_one_sample() {
        let map = FeatureMap::filled(2, 5, 5, 0.75);
        for t in oracle_suite(10, 1, 0, (1, 1, 1), Some(&map)).unwrap() {
            assert!(t.deviation() < 1e-15, "{t:?}");
        }
    }

    #[test]
    fn zero_trials_is_an_error() {
        assert!(oracle_suite(0, 8, 0, (1, 8, 8), None).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let trials = oracle_suite(3, 8, 0, (1, 4, 4), None).unwrap();
        let mut buf = Vec::new();
        write_oracle_csv(&mut buf, &trials).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("trial,channel,top,bottom,left,right,exact,quadrature,deviation\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
