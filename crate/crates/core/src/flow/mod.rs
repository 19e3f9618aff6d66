//! Dense optical flow, whole-frame motion intensity and caretaker-entry segmentation.

mod dis;
mod image;
mod segment;

use std::io::Write;

use chrono::NaiveDateTime;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ingest::{EventKind, EventRecord, FrameSequence};

pub use dis::{dense_flow, motion_magnitude, DisParams, FlowField};
pub use image::Image;
pub use segment::{
    condition_intensity, segment_clip, segment_clip_with, Condition, ConditionIntensity, EntrySegmentation,
    MotionIntensitySeries, SegmentParams, Window,
};

#[derive(Debug, thiserror::Error)]
pub enum FlowError {
    #[error("frame dimension mismatch: {prev:?} vs {next:?}")]
    DimensionMismatch { prev: (usize, usize), next: (usize, usize) },
    #[error("frame {width}x{height} at the coarsest level is smaller than one {patch}x{patch} patch")]
    FrameTooSmall { width: usize, height: usize, patch: usize },
    #[error("invalid flow parameters: {0}")]
    InvalidParams(String),
    #[error("entry interval [{start}, {end}) outside clip of {duration} s")]
    EntryOutsideClip { start: f64, end: f64, duration: f64 },
    #[error("no frames in condition {0}")]
    EmptyCondition(Condition),
    #[error("series has {values} values but {timestamps} timestamps")]
    SeriesLength { values: usize, timestamps: usize },
    #[error("clip needs at least two frames, got {0}")]
    TooFewFrames(usize),
    #[error("no caretaker entry found for clip {0}")]
    NoEntry(String),
}

/// Motion intensity for every consecutive frame pair of a clip.
///
/// Pairs are processed in parallel and collected in timestamp order.
pub fn clip_motion_series(seq: &FrameSequence, params: &DisParams) -> Result<MotionIntensitySeries, FlowError> {
    if seq.frames.len() < 2 {
        return Err(FlowError::TooFewFrames(seq.frames.len()));
    }
    let images: Vec<Image<f64>> = seq.frames.iter().map(Image::from_frame).collect();
    let values = images
        .par_windows(2)
        .map(|pair| dense_flow(&pair[0], &pair[1], params).map(|f| motion_magnitude(&f)))
        .collect::<Result<Vec<f64>, FlowError>>()?;
    let t0 = seq.timestamps[0];
    let timestamps = seq.timestamps.windows(2).map(|t| 0.5 * (t[0] + t[1]) - t0).collect();
    Ok(MotionIntensitySeries {
        clip_id: seq.clip_id.clone(),
        room: seq.room,
        week: seq.week,
        day: seq.day,
        values,
        timestamps,
    })
}

/// Entry interval of the first caretaker entry logged for the clip's room
/// inside its time span. The logged time is the start; the end is
/// `entry_duration_s` later, capped at the clip end.
pub fn entry_window(
    seq: &FrameSequence,
    events: &[EventRecord],
    entry_duration_s: f64,
) -> Result<(f64, f64), FlowError> {
    let start_time = seq.start_time.ok_or_else(|| FlowError::NoEntry(seq.clip_id.clone()))?;
    let duration = seq.duration_s();
    let offset = |t: NaiveDateTime| (t - start_time).num_milliseconds() as f64 / 1000.0;
    events
        .iter()
        .filter(|e| e.kind == EventKind::CaretakerEntry && e.room == seq.room)
        .map(|e| offset(e.timestamp))
        .find(|&t| t > 0.0 && t < duration)
        .map(|t| (t, (t + entry_duration_s).min(duration)))
        .ok_or_else(|| FlowError::NoEntry(seq.clip_id.clone()))
}

/// One row of `flow_intensity.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowIntensityRow {
    pub clip_id: String,
    pub room: u32,
    pub week: u32,
    pub day: Option<u32>,
    pub condition: Condition,
    pub mean_flow_px: f64,
}

pub const FLOW_HEADER: [&str; 6] = ["clip_id", "room", "week", "day", "condition", "mean_flow_px"];

impl FlowIntensityRow {
    pub fn from_intensity(series: &MotionIntensitySeries, c: &ConditionIntensity) -> Vec<Self> {
        Condition::ALL
            .iter()
            .map(|&cond| Self {
                clip_id: series.clip_id.clone(),
                room: series.room,
                week: series.week,
                day: series.day,
                condition: cond,
                mean_flow_px: c.get(cond),
            })
            .collect()
    }
}

pub fn write_flow_csv<W: Write>(rows: &[FlowIntensityRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(FLOW_HEADER)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_flow_csv<R: std::io::Read>(input: R) -> csv::Result<Vec<FlowIntensityRow>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input)
        .deserialize()
        .collect()
}
