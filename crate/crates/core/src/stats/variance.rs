use serde::{Deserialize, Serialize};

use super::anova::{anova_oneway, validate_groups};
use super::{check_finite, Df, Method, StatsError, TestResult};
use crate::scalar::{mean, sample_sd, Real};

/// Centre used for the absolute deviations in Levene's test.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeveneCenter {
    /// Original Levene: group means.
    #[default]
    Mean,
    /// Brown-Forsythe: group medians.
    Median,
}

fn median<T: Real>(xs: &[T]) -> T {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / T::of(2.0)
    }
}

/// Levene's test for equal variances: one-way ANOVA on `|x - centre|`.
pub fn levene<T: Real, G: AsRef<[T]>>(groups: &[G], center: LeveneCenter) -> Result<TestResult<T>, StatsError> {
    validate_groups(groups, 2)?;
    // with two values both deviations from the centre are equal, so a
    // design of pairs has no within-group spread of deviations at all
    if groups.iter().all(|g| g.as_ref().len() <= 2) {
        return Err(StatsError::InvalidArgument(
            "every group has at most two values; absolute deviations carry no spread".into(),
        ));
    }
    let z: Vec<Vec<T>> = groups
        .iter()
        .map(|g| {
            let g = g.as_ref();
            let c = match center {
                LeveneCenter::Mean => mean(g).expect("non-empty"),
                LeveneCenter::Median => median(g),
            };
            g.iter().map(|&x| (x - c).abs()).collect()
        })
        .collect();
    if z.iter().flatten().all(|&v| v == T::zero()) {
        return Err(StatsError::AllDeviationsZero);
    }
    let method = match center {
        LeveneCenter::Mean => Method::Levene,
        LeveneCenter::Median => Method::BrownForsythe,
    };
    match anova_oneway(&z) {
        Ok(a) => Ok(TestResult {
            method,
            statistic: a.f_stat,
            df: Df::Two(T::of_usize(a.df_between), T::of_usize(a.df_within)),
            p_value: a.p_value,
            effect: None,
        }),
        // every deviation equal but non-zero: identical spread
        Err(StatsError::ZeroVariance) => {
            let n: usize = z.iter().map(Vec::len).sum();
            Ok(TestResult {
                method,
                statistic: T::zero(),
                df: Df::Two(T::of_usize(z.len() - 1), T::of_usize(n - z.len())),
                p_value: T::one(),
                effect: None,
            })
        }
        Err(e) => Err(e),
    }
}

/// Standardises a series with the sample (`n - 1`) standard deviation.
pub fn zscore<T: Real>(series: &[T]) -> Result<Vec<T>, StatsError> {
    if series.len() < 2 {
        return Err(StatsError::SampleSize {
            given: series.len(),
            min: 2,
            max: usize::MAX,
        });
    }
    check_finite(series)?;
    let m = mean(series).expect("non-empty");
    let sd = sample_sd(series).expect("n >= 2");
    if !(sd > T::zero()) {
        return Err(StatsError::ZeroVariance);
    }
    Ok(series.iter().map(|&x| (x - m) / sd).collect())
}
