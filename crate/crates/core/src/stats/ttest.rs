use super::{check_finite, clamp_unit, Df, Method, StatsError, TestResult};
use crate::scalar::{mean, sample_sd, Real};
use crate::special::t_two_sided;

/// Paired t-test on `x - y` with Cohen's d_z as the effect size.
pub fn paired_t<T: Real>(x: &[T], y: &[T]) -> Result<TestResult<T>, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(StatsError::SampleSize {
            given: x.len(),
            min: 2,
            max: usize::MAX,
        });
    }
    check_finite(x)?;
    check_finite(y)?;
    let d: Vec<T> = x.iter().zip(y).map(|(&a, &b)| a - b).collect();
    let n = T::of_usize(d.len());
    let md = mean(&d).expect("non-empty");
    let sd = sample_sd(&d).expect("n >= 2");
    if !(sd > T::zero()) {
        return Err(StatsError::ZeroVarianceOfDifferences);
    }
    let t = md / (sd / n.sqrt());
    let df = n - T::one();
    Ok(TestResult {
        method: Method::PairedT,
        statistic: t,
        df: Df::One(df),
        p_value: clamp_unit(t_two_sided(t, df)),
        effect: Some(md / sd),
    })
}
