use serde::{Deserialize, Serialize};

use super::{AggregateError, WeeklySummary};
use crate::stats::{paired_t, Df, Method, TestResult};

/// Weekly flow means per entry condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeekConditionMeans {
    pub week: u32,
    pub before: f64,
    pub during: f64,
    pub after: Option<f64>,
}

impl WeekConditionMeans {
    /// Weeks of `room` that have both a before and a during mean, ascending.
    pub fn from_summaries(summaries: &[WeeklySummary], room: u32) -> Vec<Self> {
        let get = |week: u32, f: &str| {
            summaries
                .iter()
                .find(|s| s.room == room && s.week == week && s.feature == f)
                .map(|s| s.mean)
        };
        let mut weeks: Vec<u32> = summaries
            .iter()
            .filter(|s| s.room == room && s.feature.starts_with("flow_"))
            .map(|s| s.week)
            .collect();
        weeks.sort_unstable();
        weeks.dedup();
        weeks
            .into_iter()
            .filter_map(|w| {
                Some(Self {
                    week: w,
                    before: get(w, "flow_before")?,
                    during: get(w, "flow_during")?,
                    after: get(w, "flow_after"),
                })
            })
            .collect()
    }

    pub fn differential(&self) -> f64 {
        self.during - self.before
    }
}

/// Early and late phases, inclusive week ranges, paired by ordinal position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContrastParams {
    pub early_weeks: (u32, u32),
    pub late_weeks: (u32, u32),
}

impl Default for ContrastParams {
    fn default() -> Self {
        Self {
            early_weeks: (5, 10),
            late_weeks: (15, 20),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastResult {
    pub test: TestResult<f64>,
    pub early_weeks: Vec<u32>,
    pub late_weeks: Vec<u32>,
    /// During minus before, per paired position.
    pub early_differential: Vec<f64>,
    pub late_differential: Vec<f64>,
    pub pairing: String,
}

/// Paired t-test of the during-minus-before differential, early vs late phase.
///
/// Usable weeks of each phase are sorted; with unequal counts the first `n`
/// early weeks pair with the last `n` late weeks.
pub fn early_late_contrast(
    weekly: &[WeekConditionMeans],
    params: &ContrastParams,
) -> Result<ContrastResult, AggregateError> {
    let phase = |(a, b): (u32, u32)| {
        let mut v: Vec<&WeekConditionMeans> = weekly.iter().filter(|m| m.week >= a && m.week <= b).collect();
        v.sort_by_key(|m| m.week);
        v
    };
    let early = phase(params.early_weeks);
    let late = phase(params.late_weeks);
    if early.len() < 3 {
        return Err(AggregateError::InsufficientWeeks {
            phase: "early",
            found: early.len(),
        });
    }
    if late.len() < 3 {
        return Err(AggregateError::InsufficientWeeks {
            phase: "late",
            found: late.len(),
        });
    }
    let n = early.len().min(late.len());
    let early = &early[..n];
    let late = &late[late.len() - n..];
    let ed: Vec<f64> = early.iter().map(|m| m.differential()).collect();
    let ld: Vec<f64> = late.iter().map(|m| m.differential()).collect();
    let test = if ed.iter().zip(&ld).all(|(a, b)| a == b) {
        TestResult {
            method: Method::PairedT,
            statistic: 0.0,
            df: Df::One((n - 1) as f64),
            p_value: 1.0,
            effect: None,
        }
    } else {
        paired_t(&ed, &ld)?
    };
    let (e0, e1) = params.early_weeks;
    let (l0, l1) = params.late_weeks;
    Ok(ContrastResult {
        test,
        early_weeks: early.iter().map(|m| m.week).collect(),
        late_weeks: late.iter().map(|m| m.week).collect(),
        early_differential: ed,
        late_differential: ld,
        pairing: format!("ordinal position, weeks {e0}-{e1} vs {l0}-{l1}, {n} pairs"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weeks(pairs: &[(u32, f64, f64)]) -> Vec<WeekConditionMeans> {
        pairs
            .iter()
            .map(|&(week, before, during)| WeekConditionMeans {
                week,
                before,
                during,
                after: None,
            })
            .collect()
    }

    #[test]
    fn planted_habituation() {
        let mut v = Vec::new();
        for (i, w) in (5..=10).enumerate() {
            v.push((w, 1.0, 5.0 + 0.1 * i as f64));
        }
        for (i, w) in (11..=20).enumerate() {
            v.push((w, 1.0, 2.0 + 0.07 * (i % 3) as f64));
        }
        let r = early_late_contrast(&weeks(&v), &ContrastParams::default()).unwrap();
        assert_eq!(r.early_weeks, vec![5, 6, 7, 8, 9, 10]);
        assert_eq!(r.late_weeks, vec![15, 16, 17, 18, 19, 20]);
        assert!(r.test.statistic > 10.0 && r.test.p_value < 1e-4);
    }

    #[test]
    fn equal_phases() {
        let v: Vec<(u32, f64, f64)> = (5..=10)
            .chain(15..=20)
            .map(|w| (w, 1.0, 1.0 + f64::from(w % 5)))
            .collect();
        let r = early_late_contrast(&weeks(&v), &ContrastParams::default()).unwrap();
        assert_eq!((r.test.statistic, r.test.p_value), (0.0, 1.0));
    }

    #[test]
    fn insufficient_late_weeks() {
        let v: Vec<(u32, f64, f64)> = (5..=10).chain(19..=20).map(|w| (w, 1.0, 2.0)).collect();
        let e = early_late_contrast(&weeks(&v), &ContrastParams::default()).unwrap_err();
        assert!(e.to_string().contains("insufficient weeks"));
    }
}
