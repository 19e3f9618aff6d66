use serde::{Deserialize, Serialize};

use super::{check_finite, clamp_unit, StatsError};
use crate::scalar::Real;
use crate::special::f_sf;

/// One-way ANOVA decomposition and its F test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult<T> {
    pub f_stat: T,
    pub df_between: usize,
    pub df_within: usize,
    pub p_value: T,
    pub eta_squared: T,
    pub group_means: Vec<T>,
    pub group_sizes: Vec<usize>,
    pub grand_mean: T,
    pub ss_between: T,
    pub ss_within: T,
}

impl<T: Real> AnovaResult<T> {
    pub fn ss_total(&self) -> T {
        self.ss_between + self.ss_within
    }

    /// Within-group mean square, the error variance used by post-hoc tests.
    pub fn ms_within(&self) -> T {
        self.ss_within / T::of_usize(self.df_within)
    }
}

pub(crate) fn validate_groups<T: Real, G: AsRef<[T]>>(groups: &[G], min_size: usize) -> Result<(), StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups {
            given: groups.len(),
            needed: 2,
        });
    }
    for (index, g) in groups.iter().enumerate() {
        let g = g.as_ref();
        if g.len() < min_size {
            return Err(StatsError::GroupTooSmall {
                index,
                given: g.len(),
                needed: min_size,
            });
        }
        check_finite(g)?;
    }
    Ok(())
}

/// Classic one-way ANOVA with eta-squared effect size.
///
/// Requires at least two groups of at least two values each, and non-zero
/// total variance.
pub fn anova_oneway<T: Real, G: AsRef<[T]>>(groups: &[G]) -> Result<AnovaResult<T>, StatsError> {
    validate_groups(groups, 2)?;
    let n_total: usize = groups.iter().map(|g| g.as_ref().len()).sum();
    let grand_mean = groups.iter().flat_map(|g| g.as_ref().iter().copied()).sum::<T>() / T::of_usize(n_total);

    let mut group_means = Vec::with_capacity(groups.len());
    let mut group_sizes = Vec::with_capacity(groups.len());
    let mut ss_between = T::zero();
    let mut ss_within = T::zero();
    for g in groups {
        let g = g.as_ref();
        let n = T::of_usize(g.len());
        let m = g.iter().copied().sum::<T>() / n;
        ss_between = ss_between + n * (m - grand_mean) * (m - grand_mean);
        ss_within = ss_within + g.iter().map(|&x| (x - m) * (x - m)).sum::<T>();
        group_means.push(m);
        group_sizes.push(g.len());
    }
    let ss_total = ss_between + ss_within;
    if !(ss_total > T::zero()) {
        return Err(StatsError::ZeroVariance);
    }

    let df_between = groups.len() - 1;
    let df_within = n_total - groups.len();
    let ms_between = ss_between / T::of_usize(df_between);
    let ms_within = ss_within / T::of_usize(df_within);
    let f_stat = if ms_within > T::zero() {
        ms_between / ms_within
    } else {
        T::infinity()
    };
    let p_value = clamp_unit(f_sf(f_stat, T::of_usize(df_between), T::of_usize(df_within)));

    Ok(AnovaResult {
        f_stat,
        df_between,
        df_within,
        p_value,
        eta_squared: clamp_unit(ss_between / ss_total),
        group_means,
        group_sizes,
        grand_mean,
        ss_between,
        ss_within,
    })
}
