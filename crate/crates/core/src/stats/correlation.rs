use super::{check_finite, Df, Method, StatsError, TestResult};
use crate::scalar::Real;
use crate::special::t_two_sided;

/// Pearson product-moment correlation with its two-sided t-test.
///
/// `r` is clamped to `[-1, 1]`; `|r| = 1` reports `p = 0`.
pub fn pearson<T: Real>(x: &[T], y: &[T]) -> Result<TestResult<T>, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(StatsError::SampleSize {
            given: x.len(),
            min: 3,
            max: usize::MAX,
        });
    }
    check_finite(x)?;
    check_finite(y)?;
    let n = T::of_usize(x.len());
    let mx = x.iter().copied().sum::<T>() / n;
    let my = y.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if !(sxx > T::zero() && syy > T::zero()) {
        return Err(StatsError::ZeroVariance);
    }
    let r = (sxy / (sxx * syy).sqrt()).max(-T::one()).min(T::one());
    let df = n - T::of(2.0);
    let p = if r.abs() == T::one() {
        T::zero()
    } else {
        let t = r * (df / (T::one() - r * r)).sqrt();
        t_two_sided(t, df).max(T::zero()).min(T::one())
    };
    Ok(TestResult {
        method: Method::Pearson,
        statistic: r,
        df: Df::One(df),
        p_value: p,
        effect: Some(r),
    })
}
