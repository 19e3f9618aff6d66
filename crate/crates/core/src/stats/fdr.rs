use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::scalar::Real;

/// A p-value with its Benjamini-Hochberg q-value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FdrEntry<T> {
    pub label: String,
    pub p_raw: T,
    pub q_value: T,
    pub significant: bool,
}

/// Benjamini-Hochberg step-up adjustment. Output order follows input order.
pub fn bh_fdr<T: Real, S: AsRef<str>>(entries: &[(S, T)], q_threshold: T) -> Result<Vec<FdrEntry<T>>, StatsError> {
    for (_, p) in entries {
        if !(*p >= T::zero() && *p <= T::one()) {
            return Err(StatsError::InvalidPValue(p.as_f64()));
        }
    }
    let m = entries.len();
    let mut order: Vec<usize> = (0..m).collect();
    // stable sort: ties keep original index order
    order.sort_by(|&a, &b| entries[a].1.partial_cmp(&entries[b].1).expect("validated"));

    let mut q = vec![T::zero(); m];
    let mut running = T::one();
    for rank in (0..m).rev() {
        let idx = order[rank];
        let raw = entries[idx].1 * T::of_usize(m) / T::of_usize(rank + 1);
        running = running.min(raw);
        // q >= p holds exactly; the max only undoes rounding in p * m / m
        q[idx] = running.min(T::one()).max(entries[idx].1);
    }
    Ok(entries
        .iter()
        .zip(q)
        .map(|((label, p), q_value)| FdrEntry {
            label: label.as_ref().to_owned(),
            p_raw: *p,
            q_value,
            significant: q_value <= q_threshold,
        })
        .collect())
}
