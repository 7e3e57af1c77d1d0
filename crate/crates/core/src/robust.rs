//! Univariate robust statistics: median, MAD, one-sided MAD, and the univariate
//! depth and outlyingness that every projection-based depth reduces to.
//!
//! The slice functions assume a nonempty, finite input; [`UnivariateSample`]
//! checks that once at construction. Medians use selection rather than a full
//! sort since they run once per direction in the search loops.

use crate::error::{DepthError, Result};

/// A nonempty sample of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariateSample(Vec<f64>);

impl UnivariateSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(DepthError::EmptyData);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(DepthError::InvalidInput("non-finite value in univariate sample".into()));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn median(&self) -> f64 {
        median(&self.0)
    }

    pub fn mad(&self) -> f64 {
        mad(&self.0)
    }

    pub fn mad_plus(&self) -> f64 {
        mad_plus(&self.0)
    }

    pub fn halfspace_depth(&self, x: f64) -> f64 {
        univariate_halfspace_depth(x, &self.0)
    }

    pub fn outlyingness(&self, x: f64, asymmetric: bool) -> f64 {
        projected_outlyingness(x, &self.0, asymmetric)
    }
}

/// Median of a nonempty slice, reordering it in place. Even lengths average
/// the two middle order statistics.
pub fn median_in_place(v: &mut [f64]) -> f64 {
    let n = v.len();
    debug_assert!(n > 0);
    let mid = n / 2;
    let (left, upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower = left.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

pub fn median(values: &[f64]) -> f64 {
    median_in_place(&mut values.to_vec())
}

/// Median absolute deviation from the median (unscaled).
pub fn mad(values: &[f64]) -> f64 {
    let mut scratch = values.to_vec();
    let med = median_in_place(&mut scratch);
    scratch.iter_mut().for_each(|v| *v = (*v - med).abs());
    median_in_place(&mut scratch)
}

/// Median of the strictly positive deviations from the median; 0 when there
/// are none.
pub fn mad_plus(values: &[f64]) -> f64 {
    let med = median(values);
    let mut pos: Vec<f64> = values.iter().map(|v| v - med).filter(|&dv| dv > 0.0).collect();
    if pos.is_empty() {
        0.0
    } else {
        median_in_place(&mut pos)
    }
}

/// `min(#{y <= x}, #{y >= x}) / n`.
pub fn univariate_halfspace_depth(x: f64, values: &[f64]) -> f64 {
    let (mut le, mut ge) = (0usize, 0usize);
    for &y in values {
        le += (y <= x) as usize;
        ge += (y >= x) as usize;
    }
    le.min(ge) as f64 / values.len() as f64
}

/// Robustly standardized deviation of `x` from the sample. Symmetric:
/// `|x - med| / MAD`; asymmetric: `(x - med)_+ / MAD_+`. A zero scale gives 0
/// when the numerator is 0 and `+inf` otherwise.
pub fn projected_outlyingness(x: f64, values: &[f64], asymmetric: bool) -> f64 {
    let mut scratch = Vec::with_capacity(values.len());
    let mut work = values.to_vec();
    let (med, scale) = location_scale(&mut work, &mut scratch, asymmetric);
    standardized(x, med, scale, asymmetric)
}

#[inline]
pub fn standardized(x: f64, med: f64, scale: f64, asymmetric: bool) -> f64 {
    let num = if asymmetric { (x - med).max(0.0) } else { (x - med).abs() };
    if num == 0.0 {
        0.0
    } else if scale > 0.0 {
        num / scale
    } else {
        f64::INFINITY
    }
}

/// Median and (one-sided when `asymmetric`) MAD of `values`, which is
/// reordered. `scratch` is reused across calls to avoid allocation.
pub fn location_scale(values: &mut [f64], scratch: &mut Vec<f64>, asymmetric: bool) -> (f64, f64) {
    let med = median_in_place(values);
    scratch.clear();
    if asymmetric {
        scratch.extend(values.iter().map(|v| v - med).filter(|&dv| dv > 0.0));
        if scratch.is_empty() {
            return (med, 0.0);
        }
    } else {
        scratch.extend(values.iter().map(|v| (v - med).abs()));
    }
    (med, median_in_place(scratch))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn median_examples() {
        assert_eq!(median(&[1.0, 2.0, 3.0]), 2.0);
        assert_eq!(median(&[1.0, 2.0, 3.0, 4.0]), 2.5);
        assert_eq!(median(&[3.0, 1.0, 2.0, 100.0]), 2.5);
        assert_eq!(median(&[7.0]), 7.0);
    }

    #[test]
    fn mad_examples() {
        assert_eq!(mad(&[1.0, 2.0, 3.0, 4.0, 100.0]), 1.0);
        assert_eq!(mad(&[4.2; 6]), 0.0);
        assert_eq!(mad(&[-1.0, 0.0, 1.0]), 1.0);
    }

    #[test]
    fn mad_plus_examples() {
        assert_eq!(mad_plus(&[1.0, 2.0, 3.0, 4.0, 5.0]), 1.5);
        assert_eq!(mad_plus(&[3.0, 3.0, 3.0]), 0.0);
        assert_eq!(mad_plus(&[0.0, 0.0, 0.0, 10.0]), 10.0);
    }

    #[test]
    fn univariate_halfspace_examples() {
        let s = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(univariate_halfspace_depth(3.0, &s), 0.6);
        assert_eq!(univariate_halfspace_depth(0.0, &s), 0.0);
        assert_eq!(univariate_halfspace_depth(1.0, &s), 0.2);
    }

    #[test]
    fn outlyingness_examples() {
        assert_eq!(projected_outlyingness(2.0, &[-1.0, 0.0, 1.0], false), 2.0);
        assert_eq!(projected_outlyingness(0.0, &[-1.0, 0.0, 1.0], false), 0.0);
        assert_eq!(projected_outlyingness(0.0, &[1.0, 1.0, 1.0], false), f64::INFINITY);
        assert_eq!(projected_outlyingness(1.0, &[1.0, 1.0, 1.0], false), 0.0);
        // asymmetric looks only above the median
        assert_eq!(projected_outlyingness(-5.0, &[0.0, 1.0, 2.0], true), 0.0);
        assert_eq!(projected_outlyingness(4.0, &[0.0, 1.0, 2.0], true), 3.0);
    }

    #[test]
    fn sample_validation() {
        assert!(UnivariateSample::new(vec![]).is_err());
        assert!(UnivariateSample::new(vec![1.0, f64::INFINITY]).is_err());
        let s = UnivariateSample::new(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.median(), 2.0);
        assert_eq!(s.mad(), 1.0);
    }

    fn sample() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-1e3..1e3f64, 1..60)
    }

    proptest! {
        #[test]
        fn median_mad_equivariance(s in sample(), c in -50.0..50.0f64, k in prop::sample::select(vec![-4.0, -2.0, -0.5, 0.25, 2.0, 8.0])) {
            // powers of two keep the scaling exact
            let shifted: Vec<f64> = s.iter().map(|v| v + c).collect();
            let scaled: Vec<f64> = s.iter().map(|v| v * k).collect();
            let (m, a) = (median(&s), mad(&s));
            prop_assert!((median(&shifted) - (m + c)).abs() <= 1e-9 * (1.0 + m.abs() + c.abs()));
            prop_assert!((mad(&shifted) - a).abs() <= 1e-9 * (1.0 + m.abs() + c.abs()));
            prop_assert_eq!(median(&scaled), k * m);
            prop_assert_eq!(mad(&scaled), k.abs() * a);
        }

        #[test]
        fn univariate_depth_bounds(s in proptest::collection::hash_set(-1_000_000i64..1_000_000, 1..60), x in -2e6..2e6f64) {
            // distinct values: ties can push the depth above one half
            let v: Vec<f64> = s.into_iter().map(|i| i as f64).collect();
            let n = v.len() as f64;
            let dep = univariate_halfspace_depth(x, &v);
            prop_assert!(dep <= 0.5 + 1.0 / (2.0 * n) + 1e-15);
            let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
            if x < lo || x > hi {
                prop_assert_eq!(dep, 0.0);
            }
        }

        #[test]
        fn outlyingness_zero_at_median(s in sample()) {
            if mad(&s) > 0.0 {
                prop_assert_eq!(projected_outlyingness(median(&s), &s, false), 0.0);
            }
        }
    }
}
