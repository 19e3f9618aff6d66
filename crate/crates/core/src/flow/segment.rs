use serde::{Deserialize, Serialize};

use super::FlowError;

/// Half-open time window `[start, end)` in seconds from clip start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub start: f64,
    pub end: f64,
    /// Shorter than the configured minimum window length.
    pub short: bool,
}

impl Window {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t < self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Before,
    During,
    After,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::Before, Condition::During, Condition::After];

    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Before => "before",
            Condition::During => "during",
            Condition::After => "after",
        }
    }
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntrySegmentation {
    pub before: Window,
    pub during: Window,
    pub after: Window,
}

impl EntrySegmentation {
    pub fn window(&self, c: Condition) -> Window {
        match c {
            Condition::Before => self.before,
            Condition::During => self.during,
            Condition::After => self.after,
        }
    }

    pub fn any_short(&self) -> bool {
        self.before.short || self.during.short || self.after.short
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SegmentParams {
    pub pre_window_s: f64,
    pub post_window_s: f64,
    pub min_window_s: f64,
    pub block_s: f64,
    /// A trailing partial block is kept when at least this long.
    pub min_partial_block_s: f64,
}

impl Default for SegmentParams {
    fn default() -> Self {
        Self {
            pre_window_s: 420.0,
            post_window_s: 420.0,
            min_window_s: 60.0,
            block_s: 30.0,
            min_partial_block_s: 15.0,
        }
    }
}

/// Splits a clip around a caretaker entry with the default 7-minute flanks.
pub fn segment_clip(clip_duration: f64, entry_start: f64, entry_end: f64) -> Result<EntrySegmentation, FlowError> {
    segment_clip_with(clip_duration, entry_start, entry_end, &SegmentParams::default())
}

pub fn segment_clip_with(
    clip_duration: f64,
    entry_start: f64,
    entry_end: f64,
    p: &SegmentParams,
) -> Result<EntrySegmentation, FlowError> {
    let ok = [clip_duration, entry_start, entry_end].iter().all(|v| v.is_finite())
        && 0.0 < entry_start
        && entry_start < entry_end
        && entry_end <= clip_duration;
    if !ok {
        return Err(FlowError::EntryOutsideClip {
            start: entry_start,
            end: entry_end,
            duration: clip_duration,
        });
    }
    let window = |start: f64, end: f64| Window {
        start,
        end,
        short: end - start < p.min_window_s,
    };
    Ok(EntrySegmentation {
        before: window((entry_start - p.pre_window_s).max(0.0), entry_start),
        during: window(entry_start, entry_end),
        after: window(entry_end, clip_duration.min(entry_end + p.post_window_s)),
    })
}

/// Per-pair motion magnitudes of one clip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionIntensitySeries {
    pub clip_id: String,
    pub room: u32,
    pub week: u32,
    pub day: Option<u32>,
    /// Mean flow magnitude per consecutive frame pair, pixels/frame.
    pub values: Vec<f64>,
    /// Seconds from clip start; midpoint of each pair.
    pub timestamps: Vec<f64>,
}

/// Per-condition motion intensity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionIntensity {
    pub before: f64,
    pub during: f64,
    pub after: f64,
}

impl ConditionIntensity {
    pub fn get(&self, c: Condition) -> f64 {
        match c {
            Condition::Before => self.before,
            Condition::During => self.during,
            Condition::After => self.after,
        }
    }
}

fn window_intensity(values: &[f64], times: &[f64], w: Window, p: &SegmentParams) -> Option<f64> {
    let mut block_means = Vec::new();
    let mut k = 0usize;
    loop {
        let b0 = w.start + k as f64 * p.block_s;
        if b0 >= w.end {
            break;
        }
        let b1 = (b0 + p.block_s).min(w.end);
        let only_block = k == 0 && b1 >= w.end;
        if b1 - b0 >= p.block_s || b1 - b0 >= p.min_partial_block_s || only_block {
            let (mut sum, mut n) = (0.0, 0usize);
            for (&v, &t) in values.iter().zip(times) {
                if t >= b0 && t < b1 {
                    sum += v;
                    n += 1;
                }
            }
            if n > 0 {
                block_means.push(sum / n as f64);
            }
        }
        k += 1;
    }
    if block_means.is_empty() {
        None
    } else {
        Some(block_means.iter().sum::<f64>() / block_means.len() as f64)
    }
}

/// Mean of 30-second block means within each condition window.
pub fn condition_intensity(
    series: &MotionIntensitySeries,
    seg: &EntrySegmentation,
    p: &SegmentParams,
) -> Result<ConditionIntensity, FlowError> {
    if series.values.len() != series.timestamps.len() {
        return Err(FlowError::SeriesLength {
            values: series.values.len(),
            timestamps: series.timestamps.len(),
        });
    }
    let get = |c: Condition| {
        window_intensity(&series.values, &series.timestamps, seg.window(c), p).ok_or(FlowError::EmptyCondition(c))
    };
    Ok(ConditionIntensity {
        before: get(Condition::Before)?,
        during: get(Condition::During)?,
        after: get(Condition::After)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: Vec<f64>, timestamps: Vec<f64>) -> MotionIntensitySeries {
        MotionIntensitySeries {
            clip_id: "c".into(),
            room: 1,
            week: 5,
            day: None,
            values,
            timestamps,
        }
    }

    #[test]
    fn table_windows() {
        let s = segment_clip(900.0, 420.0, 510.0).unwrap();
        assert_eq!((s.before.start, s.before.end), (0.0, 420.0));
        assert_eq!((s.during.start, s.during.end), (420.0, 510.0));
        assert_eq!((s.after.start, s.after.end), (510.0, 900.0));
        assert!(!s.any_short());
    }

    #[test]
    fn short_before_flagged() {
        let s = segment_clip(900.0, 100.0, 160.0).unwrap();
        assert_eq!((s.before.start, s.before.end), (0.0, 100.0));
        assert!(!s.before.short);
        let s = segment_clip(900.0, 40.0, 160.0).unwrap();
        assert!(s.before.short);
        assert_eq!((s.after.start, s.after.end), (160.0, 580.0));
    }

    #[test]
    fn rejects_entry_outside_clip() {
        assert!(segment_clip(900.0, 850.0, 950.0).is_err());
        assert!(segment_clip(900.0, 0.0, 60.0).is_err());
        assert!(segment_clip(900.0, 500.0, 400.0).is_err());
    }

    #[test]
    fn constant_and_burst() {
        let times: Vec<f64> = (0..900).map(|i| i as f64 + 0.5).collect();
        let seg = segment_clip(900.0, 420.0, 510.0).unwrap();
        let p = SegmentParams::default();
        let c = condition_intensity(&series(vec![2.0; 900], times.clone()), &seg, &p).unwrap();
        assert_eq!((c.before, c.during, c.after), (2.0, 2.0, 2.0));
        let burst: Vec<f64> = times
            .iter()
            .map(|&t| if seg.during.contains(t) { 5.0 } else { 1.0 })
            .collect();
        let c = condition_intensity(&series(burst, times), &seg, &p).unwrap();
        assert!((c.before - 1.0).abs() < 1e-9 && (c.during - 5.0).abs() < 1e-9 && (c.after - 1.0).abs() < 1e-9);
    }

    #[test]
    fn block_means_not_pair_means() {
        // before = [0, 45): one full block and a 15 s partial block, kept
        let mut times: Vec<f64> = (0..30).map(|i| i as f64 + 0.5).collect();
        let mut vals = vec![1.0; 30];
        times.push(40.0);
        vals.push(4.0);
        times.push(50.0);
        vals.push(9.0);
        times.push(70.0);
        vals.push(9.0);
        let seg = segment_clip(80.0, 45.0, 60.0).unwrap();
        let c = condition_intensity(&series(vals, times), &seg, &SegmentParams::default()).unwrap();
        assert_eq!(c.before, 2.5);
    }

    #[test]
    fn short_trailing_block_dropped() {
        let times = vec![10.0, 35.0];
        let seg = segment_clip(100.0, 40.0, 50.0).unwrap();
        let s = series(vec![1.0, 7.0], times);
        let err = condition_intensity(&s, &seg, &SegmentParams::default()).unwrap_err();
        assert_eq!(err.to_string(), "no frames in condition during");
        let mut s2 = s.clone();
        s2.values.push(3.0);
        s2.timestamps.push(45.0);
        s2.values.push(3.0);
        s2.timestamps.push(60.0);
        let c = condition_intensity(&s2, &seg, &SegmentParams::default()).unwrap();
        assert_eq!(c.before, 1.0);
    }
}
