use super::anova::validate_groups;
use super::{clamp_unit, Df, Method, StatsError, TestResult};
use crate::scalar::Real;
use crate::special::chi2_sf;

/// Average ranks (1-based) of the pooled values, plus the tie term
/// `Σ (t³ - t)` over tie groups.
pub(crate) fn average_ranks<T: Real>(values: &[T]) -> (Vec<T>, T) {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite"));
    let mut ranks = vec![T::zero(); values.len()];
    let mut ties = T::zero();
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let avg = T::of((i + j) as f64 / 2.0 + 1.0);
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        let t = T::of_usize(j - i + 1);
        ties = ties + t * t * t - t;
        i = j + 1;
    }
    (ranks, ties)
}

/// Kruskal-Wallis H test with the standard tie correction.
pub fn kruskal_wallis<T: Real, G: AsRef<[T]>>(groups: &[G]) -> Result<TestResult<T>, StatsError> {
    validate_groups(groups, 1)?;
    let pooled: Vec<T> = groups.iter().flat_map(|g| g.as_ref().iter().copied()).collect();
    let n = pooled.len();
    if n < 3 {
        return Err(StatsError::SampleSize {
            given: n,
            min: 3,
            max: usize::MAX,
        });
    }
    let (ranks, ties) = average_ranks(&pooled);
    let nf = T::of_usize(n);
    let correction = T::one() - ties / (nf * nf * nf - nf);
    if !(correction > T::zero()) {
        return Err(StatsError::AllValuesIdentical);
    }
    let mut offset = 0;
    let mut sum = T::zero();
    for g in groups {
        let len = g.as_ref().len();
        let r: T = ranks[offset..offset + len].iter().copied().sum();
        sum = sum + r * r / T::of_usize(len);
        offset += len;
    }
    let h = (T::of(12.0) / (nf * (nf + T::one())) * sum - T::of(3.0) * (nf + T::one())) / correction;
    let h = h.max(T::zero());
    let df = T::of_usize(groups.len() - 1);
    Ok(TestResult {
        method: Method::KruskalWallis,
        statistic: h,
        df: Df::One(df),
        p_value: clamp_unit(chi2_sf(h, df)),
        effect: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hand_ranks() {
        let r = kruskal_wallis(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        // rank sums 3, 7, 11 -> 12/42 * (9 + 49 + 121)/2 - 21
        let h = 12.0 / 42.0 * (9.0 + 49.0 + 121.0) / 2.0 - 21.0;
        assert_relative_eq!(r.statistic, h, epsilon = 1e-12);
        assert_relative_eq!(r.p_value, (-h / 2.0_f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(r.p_value, 0.101_701_392_304_226_94, epsilon = 1e-12);
    }

    #[test]
    fn ties_use_average_ranks() {
        let (ranks, ties) = average_ranks(&[2.0, 1.0, 2.0, 3.0]);
        assert_eq!(ranks, vec![2.5, 1.0, 2.5, 4.0]);
        assert_eq!(ties, 6.0);
    }

    #[test]
    fn identical_groups_and_constant_values() {
        let r = kruskal_wallis(&[[1.0_f64, 2.0, 3.0], [1.0, 2.0, 3.0]]).unwrap();
        assert!(r.statistic.abs() < 1e-12);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        assert_eq!(
            kruskal_wallis(&[[4.0, 4.0], [4.0, 4.0]]).unwrap_err(),
            StatsError::AllValuesIdentical
        );
    }
}
