use serde::{Deserialize, Serialize};

use super::anova::anova_oneway;
use super::srange::srange_sf;
use super::StatsError;
use crate::scalar::Real;

/// One pairwise contrast from Tukey's HSD.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TukeyComparison<T> {
    pub group_a: usize,
    pub group_b: usize,
    /// `mean_a - mean_b`.
    pub mean_diff: T,
    pub q_stat: T,
    pub p_adjusted: T,
    pub significant: bool,
}

/// All pairwise Tukey-Kramer comparisons, `(a, b)` with `a < b`.
///
/// Group sizes may differ. P-values come from the studentized range with
/// `k` groups and the ANOVA within-group degrees of freedom.
pub fn tukey_hsd<T: Real, G: AsRef<[T]>>(groups: &[G], alpha: T) -> Result<Vec<TukeyComparison<T>>, StatsError> {
    let anova = anova_oneway(groups)?;
    let k = groups.len();
    let msw = anova.ms_within();
    let df = T::of_usize(anova.df_within);
    let two = T::of(2.0);
    let mut out = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..k {
        for b in (a + 1)..k {
            let diff = anova.group_means[a] - anova.group_means[b];
            let inv_n = T::one() / T::of_usize(anova.group_sizes[a]) + T::one() / T::of_usize(anova.group_sizes[b]);
            let se = (msw / two * inv_n).sqrt();
            let (q_stat, p) = if diff == T::zero() {
                (T::zero(), T::one())
            } else if se > T::zero() {
                let q = diff.abs() / se;
                (q, srange_sf(q, k, df)?)
            } else {
                (T::infinity(), T::zero())
            };
            out.push(TukeyComparison {
                group_a: a,
                group_b: b,
                mean_diff: diff,
                q_stat,
                p_adjusted: p,
                significant: p < alpha,
            });
        }
    }
    Ok(out)
}
