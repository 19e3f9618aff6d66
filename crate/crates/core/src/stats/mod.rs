//! Hypothesis tests, effect sizes and multiple-comparison control.
//!
//! All procedures are pure functions over borrowed samples and are generic
//! over [`Real`](crate::Real).

mod anova;
mod correlation;
mod fdr;
mod nonparametric;
mod normality;
mod srange;
mod ttest;
mod tukey;
mod variance;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use anova::{anova_oneway, AnovaResult};
pub use correlation::pearson;
pub use fdr::{bh_fdr, FdrEntry};
pub use nonparametric::kruskal_wallis;
pub use normality::shapiro_wilk;
pub use srange::{srange_cdf_infinite_df, srange_sf};
pub use ttest::paired_t;
pub use tukey::{tukey_hsd, TukeyComparison};
pub use variance::{levene, zscore, LeveneCenter};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("need at least {needed} groups, got {given}")]
    TooFewGroups { given: usize, needed: usize },
    #[error("group {index} has {given} values, need at least {needed}")]
    GroupTooSmall { index: usize, given: usize, needed: usize },
    #[error("sample size {given} outside [{min}, {max}]")]
    SampleSize { given: usize, min: usize, max: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("zero variance")]
    ZeroVariance,
    #[error("zero variance of differences")]
    ZeroVarianceOfDifferences,
    #[error("all deviations zero")]
    AllDeviationsZero,
    #[error("all values identical")]
    AllValuesIdentical,
    #[error("p-value {0} outside [0, 1]")]
    InvalidPValue(f64),
    #[error("non-finite input")]
    NonFinite,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Which procedure produced a [`TestResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    ShapiroWilk,
    Levene,
    BrownForsythe,
    KruskalWallis,
    PairedT,
    Pearson,
}

/// Degrees of freedom of a test statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Df<T> {
    None,
    One(T),
    Two(T, T),
}

/// Outcome of a single-statistic hypothesis test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult<T> {
    pub method: Method,
    pub statistic: T,
    pub df: Df<T>,
    pub p_value: T,
    /// Cohen's d_z for the paired t-test, r for Pearson.
    pub effect: Option<T>,
}

pub(crate) fn check_finite<T: crate::Real>(xs: &[T]) -> Result<(), StatsError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(StatsError::NonFinite)
    }
}

pub(crate) fn clamp_unit<T: crate::Real>(p: T) -> T {
    p.max(T::zero()).min(T::one())
}
