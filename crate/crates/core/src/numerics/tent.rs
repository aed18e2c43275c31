use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Half-open span `[lo, hi]` along one axis, `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::NonFinite("interval"));
        }
        if lo >= hi {
            return Err(Error::arg(format!("interval requires lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

/// `max(0, 1 - |u - center|)`.
#[inline]
pub fn tent_boundary_value(center: i64, u: f64) -> f64 {
    (1.0 - (u - center as f64).abs()).max(0.0)
}

/// Exact `∫ max(0, 1 - |u - center|) du` over `iv`.
pub fn tent_integral(center: i64, iv: Interval) -> f64 {
    tent_integral_raw(center, iv.lo, iv.hi)
}

/// Same as [`tent_integral`] for any `lo <= hi`.
///
/// The rising and falling halves are integrated separately in factored form
/// so that thin slivers at the edge of the support keep full relative
/// precision instead of cancelling against the unit total area.
#[inline]
pub(crate) fn tent_integral_raw(center: i64, lo: f64, hi: f64) -> f64 {
    let c = center as f64;
    // Rising half on [c-1, c]: integrand s = u - (c - 1). Empty overlaps
    // collapse to `a == b` and contribute exactly zero.
    let a = lo.max(c - 1.0);
    let b = hi.min(c).max(a);
    let (sa, sb) = (a - (c - 1.0), b - (c - 1.0));
    let rising = 0.5 * (sb - sa) * (sb + sa);
    // Falling half on [c, c+1]: integrand t = (c + 1) - u.
    let a = lo.max(c);
    let b = hi.min(c + 1.0).max(a);
    let (ta, tb) = ((c + 1.0) - a, (c + 1.0) - b);
    rising + 0.5 * (ta - tb) * (ta + tb)
}

/// Pixel spans up to this length avoid a heap allocation.
const INLINE_WEIGHTS: usize = 16;

/// Tent-integral weights of every pixel along one axis whose tent overlaps
/// `[lo, hi]`, clipped to `0..size`.
///
/// The range is `floor(lo) ..= ceil(hi)`; every pixel in it has a strictly
/// positive weight and every pixel outside it has weight zero.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisWeights {
    pub start: usize,
    weights: SmallVec<[f64; INLINE_WEIGHTS]>,
}

impl AxisWeights {
    pub fn new(lo: f64, hi: f64, size: usize) -> Self {
        let (first, last) = support_range(lo, hi, size);
        match (first, last) {
            (Some(first), Some(last)) if first <= last => Self {
                start: first,
                weights: (first..=last).map(|q| tent_integral_raw(q as i64, lo, hi)).collect(),
            },
            _ => Self {
                start: 0,
                weights: SmallVec::new(),
            },
        }
    }

    /// Tent values at `u` for the same pixel range as `self`.
    pub fn boundary_values(&self, u: f64) -> Vec<f64> {
        (0..self.weights.len())
            .map(|i| tent_boundary_value((self.start + i) as i64, u))
            .collect()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn end(&self) -> usize {
        self.start + self.weights.len()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Inclusive in-domain pixel range whose tents overlap `(lo, hi)` with
/// positive measure.
pub(crate) fn support_range(lo: f64, hi: f64, size: usize) -> (Option<usize>, Option<usize>) {
    if !(lo.is_finite() && hi.is_finite()) || size == 0 {
        return (None, None);
    }
    let first = floor_i64(lo).max(0);
    let last = ceil_i64(hi).min(size as i64 - 1);
    if first > last {
        return (None, None);
    }
    (Some(first as usize), Some(last as usize))
}

/// `floor` without a libm call; exact for |x| < 2^63.
#[inline]
fn floor_i64(x: f64) -> i64 {
    let t = x as i64;
    if (t as f64) > x {
        t - 1
    } else {
        t
    }
}

#[inline]
fn ceil_i64(x: f64) -> i64 {
    let t = x as i64;
    if (t as f64) < x {
        t + 1
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::XorShift64Star;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    /// Midpoint rule, the independent check for the closed form.
    fn midpoint(center: i64, lo: f64, hi: f64, n: usize) -> f64 {
        let h = (hi - lo) / n as f64;
        (0..n)
            .map(|i| tent_boundary_value(center, lo + (i as f64 + 0.5) * h) * h)
            .sum()
    }

    #[test]
    fn full_tent_has_unit_area() {
        assert_eq!(tent_integral(0, iv(-1.0, 1.0)), 1.0);
        assert_eq!(tent_integral(3, iv(-10.0, 10.0)), 1.0);
    }

    #[test]
    fn central_half_is_three_quarters() {
        let exact = tent_integral(0, iv(-0.5, 0.5));
        assert!((exact - 0.75).abs() < 1e-15);
        assert!((midpoint(0, -0.5, 0.5, 1_000_000) - 0.75).abs() < 1e-10);
    }

    #[test]
    fn disjoint_interval_is_zero() {
        assert_eq!(tent_integral(5, iv(7.0, 9.0)), 0.0);
        assert_eq!(tent_integral(5, iv(6.0, 9.0)), 0.0);
    }

    #[test]
    fn boundary_values() {
        assert_eq!(tent_boundary_value(0, 0.0), 1.0);
        assert_eq!(tent_boundary_value(0, 0.25), 0.75);
        assert_eq!(tent_boundary_value(0, 3.0), 0.0);
        assert_eq!(tent_boundary_value(2, 1.5), 0.5);
    }

    #[test]
    fn interval_validation() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn sliver_keeps_precision() {
        let lo = 1.0 - 1e-9;
        let d = 1.0 - lo;
        let v = tent_integral(0, iv(lo, 1.0));
        assert!((v - d * d / 2.0).abs() < 1e-12 * d * d);
        assert!(v > 0.0);
    }

    #[test]
    fn matches_midpoint_quadrature() {
        let mut rng = XorShift64Star::new(1);
        for _ in 0..200 {
            let c = rng.below(5) as i64 - 2;
            let lo = rng.uniform(-3.0, 3.0);
            let hi = lo + rng.uniform(0.01, 3.0);
            let exact = tent_integral(c, iv(lo, hi));
            assert!((exact - midpoint(c, lo, hi, 10_000)).abs() < 1e-7);
            assert!(exact >= 0.0 && exact <= 1.0_f64.min(hi - lo) + 1e-15);
        }
    }

    #[test]
    fn axis_weights_range() {
        let w = AxisWeights::new(0.5, 2.0, 10);
        assert_eq!(w.start, 0);
        assert_eq!(w.len(), 3);
        assert!(w.weights().iter().all(|&v| v > 0.0));
        let w = AxisWeights::new(-5.0, -1.0, 10);
        assert!(w.is_empty());
        let w = AxisWeights::new(-1.5, 0.5, 3);
        assert_eq!((w.start, w.len()), (0, 2));
        let w = AxisWeights::new(8.5, 20.0, 10);
        assert_eq!((w.start, w.len()), (8, 2));
    }

    #[test]
    fn axis_weights_sum_to_length_inside() {
        // Tents form a partition of unity, so weights over an interior span sum to its length.
        let w = AxisWeights::new(1.3, 4.7, 8);
        let s: f64 = w.weights().iter().sum();
        assert!((s - 3.4).abs() < 1e-14);
    }
}
