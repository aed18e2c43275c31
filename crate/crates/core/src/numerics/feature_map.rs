use crate::error::{Error, Result};

/// Channel-major, row-major grid of `f64` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl FeatureMap {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(Error::shape(format!(
                "feature map dims must be positive, got {channels}x{height}x{width}"
            )));
        }
        let expected = channels
            .checked_mul(height)
            .and_then(|v| v.checked_mul(width))
            .ok_or_else(|| Error::shape("feature map too large"))?;
        if data.len() != expected {
            return Err(Error::shape(format!(
                "expected {expected} samples for {channels}x{height}x{width}, got {}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("feature map"));
        }
        Ok(Self {
            channels,
            height,
            width,
            data,
        })
    }

    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        Self::filled(channels, height, width, 0.0)
    }

    /// # Panics
    /// If any dimension is zero or `value` is not finite.
    pub fn filled(channels: usize, height: usize, width: usize, value: f64) -> Self {
        Self::new(channels, height, width, vec![value; channels * height * width])
            .expect("valid dims and finite fill value")
    }

    /// Builds a map by evaluating `f(channel, y, x)` at every pixel.
    pub fn from_fn(
        channels: usize,
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(channels * height * width);
        for c in 0..channels {
            for y in 0..height {
                for x in 0..width {
                    data.push(f(c, y, x));
                }
            }
        }
        Self::new(channels, height, width, data)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// `(channels, height, width)`
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Mutable access to the raw samples. Callers must keep them finite.
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn index(&self, c: usize, y: usize, x: usize) -> usize {
        (c * self.height + y) * self.width + x
    }

    #[inline]
    pub fn get(&self, c: usize, y: usize, x: usize) -> f64 {
        self.data[self.index(c, y, x)]
    }

    #[inline]
    pub fn set(&mut self, c: usize, y: usize, x: usize, v: f64) {
        let i = self.index(c, y, x);
        self.data[i] = v;
    }

    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.height * self.width;
        &self.data[c * n..(c + 1) * n]
    }

    pub fn plane_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.height * self.width;
        &mut self.data[c * n..(c + 1) * n]
    }

    /// Value at integer coordinates, zero outside the domain.
    #[inline]
    pub fn get_padded(&self, c: usize, y: i64, x: i64) -> f64 {
        if y < 0 || x < 0 || y >= self.height as i64 || x >= self.width as i64 {
            0.0
        } else {
            self.get(c, y as usize, x as usize)
        }
    }

    pub(crate) fn check_channel(&self, channel: usize) -> Result<()> {
        if channel >= self.channels {
            Err(Error::arg(format!(
                "channel {channel} out of range for {} channels",
                self.channels
            )))
        } else {
            Ok(())
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// A location in continuous pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousPoint {
    pub x: f64,
    pub y: f64,
}

impl ContinuousPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFinite("point coordinates"));
        }
        Ok(Self { x, y })
    }
}

/// Bilinear interpolation of one channel with zero padding.
///
/// At integer coordinates inside the domain this returns the stored sample
/// exactly.
pub fn bilinear_sample(map: &FeatureMap, channel: usize, p: ContinuousPoint) -> Result<f64> {
    map.check_channel(channel)?;
    Ok(bilinear_unchecked(map, channel, p.x, p.y))
}

/// Bilinear sample without the channel check; `x`, `y` must be finite.
pub(crate) fn bilinear_unchecked(map: &FeatureMap, c: usize, x: f64, y: f64) -> f64 {
    let (h, w) = (map.height as f64, map.width as f64);
    if x <= -1.0 || y <= -1.0 || x >= w || y >= h {
        return 0.0;
    }
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let (xi, yi) = (x0 as i64, y0 as i64);
    let v00 = map.get_padded(c, yi, xi);
    let v01 = map.get_padded(c, yi, xi + 1);
    let v10 = map.get_padded(c, yi + 1, xi);
    let v11 = map.get_padded(c, yi + 1, xi + 1);
    // Zero weights are skipped so that exact pixel hits return the sample bitwise.
    let mut acc = 0.0;
    let wx0 = 1.0 - fx;
    let wy0 = 1.0 - fy;
    if wy0 != 0.0 {
        if wx0 != 0.0 {
            acc += wy0 * wx0 * v00;
        }
        if fx != 0.0 {
            acc += wy0 * fx * v01;
        }
    }
    if fy != 0.0 {
        if wx0 != 0.0 {
            acc += fy * wx0 * v10;
        }
        if fx != 0.0 {
            acc += fy * fx * v11;
        }
    }
    acc
}

/// Pixel weights of a bilinear sample: up to four `(y, x, weight)` entries,
/// in-domain and strictly positive.
pub(crate) fn bilinear_taps(height: usize, width: usize, x: f64, y: f64) -> impl Iterator<Item = (usize, usize, f64)> {
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let (xi, yi) = (x0 as i64, y0 as i64);
    let taps = [
        (yi, xi, (1.0 - fy) * (1.0 - fx)),
        (yi, xi + 1, (1.0 - fy) * fx),
        (yi + 1, xi, fy * (1.0 - fx)),
        (yi + 1, xi + 1, fy * fx),
    ];
    let finite = x.is_finite() && y.is_finite() && x.abs() < 1e15 && y.abs() < 1e15;
    taps.into_iter().filter_map(move |(ty, tx, wgt)| {
        (finite && wgt > 0.0 && ty >= 0 && tx >= 0 && (ty as usize) < height && (tx as usize) < width).then_some((
            ty as usize,
            tx as usize,
            wgt,
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::XorShift64Star;

    fn plane_2x2() -> FeatureMap {
        // f(x, y): f(0,0)=0, f(1,0)=1, f(0,1)=2, f(1,1)=3; stored row-major (y, x).
        FeatureMap::new(1, 2, 2, vec![0.0, 1.0, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(FeatureMap::new(1, 2, 2, vec![0.0; 3]).is_err());
        assert!(FeatureMap::new(0, 2, 2, vec![]).is_err());
        assert!(matches!(
            FeatureMap::new(1, 1, 2, vec![0.0, f64::NAN]),
            Err(Error::NonFinite(_))
        ));
        assert!(ContinuousPoint::new(f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn sample_cell_center() {
        let m = plane_2x2();
        let v = bilinear_sample(&m, 0, ContinuousPoint { x: 0.5, y: 0.5 }).unwrap();
        assert_eq!(v, 1.5);
    }

    #[test]
    fn sample_integer_point_is_exact() {
        let m = FeatureMap::from_fn(1, 3, 3, |_, y, x| 0.1 * (y * 3 + x) as f64 + 1.0 / 3.0).unwrap();
        for y in 0..3 {
            for x in 0..3 {
                let p = ContinuousPoint {
                    x: x as f64,
                    y: y as f64,
                };
                assert_eq!(bilinear_sample(&m, 0, p).unwrap(), m.get(0, y, x));
            }
        }
    }

    #[test]
    fn sample_far_outside_is_zero() {
        let m = plane_2x2();
        let v = bilinear_sample(&m, 0, ContinuousPoint { x: -2.0, y: -2.0 }).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn sample_bad_channel() {
        let m = plane_2x2();
        assert!(matches!(
            bilinear_sample(&m, 1, ContinuousPoint { x: 0.0, y: 0.0 }),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn sample_fades_into_padding() {
        let m = FeatureMap::filled(1, 2, 2, 4.0);
        let v = bilinear_sample(&m, 0, ContinuousPoint { x: -0.25, y: 0.0 }).unwrap();
        assert!((v - 3.0).abs() < 1e-15);
    }

    #[test]
    fn taps_match_sample() {
        let mut rng = XorShift64Star::new(11);
        let m = FeatureMap::from_fn(1, 5, 6, |_, _, _| rng.uniform(-1.0, 1.0)).unwrap();
        let mut rng = XorShift64Star::new(12);
        for _ in 0..200 {
            let x = rng.uniform(-1.5, 6.5);
            let y = rng.uniform(-1.5, 5.5);
            let via_taps: f64 = bilinear_taps(5, 6, x, y).map(|(ty, tx, w)| w * m.get(0, ty, tx)).sum();
            let direct = bilinear_unchecked(&m, 0, x, y);
            assert!((via_taps - direct).abs() < 1e-14);
            assert!(bilinear_taps(5, 6, x, y).count() <= 4);
        }
    }

    #[test]
    fn sample_is_lipschitz() {
        let mut rng = XorShift64Star::new(5);
        for _ in 0..50 {
            let m = FeatureMap::from_fn(1, 6, 6, |_, _, _| rng.uniform(-3.0, 3.0)).unwrap();
            let lip = 2.0 * m.max_abs();
            for _ in 0..50 {
                let x = rng.uniform(-1.0, 6.0);
                let y = rng.uniform(-1.0, 6.0);
                let dx = rng.uniform(-0.01, 0.01);
                let dy = rng.uniform(-0.01, 0.01);
                let a = bilinear_unchecked(&m, 0, x, y);
                let b = bilinear_unchecked(&m, 0, x + dx, y + dy);
                let dist = dx.abs() + dy.abs();
                assert!((a - b).abs() <= lip * dist + 1e-12);
            }
        }
    }
}
