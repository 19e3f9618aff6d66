//! Clip preprocessing and the six spectral/temporal acoustic descriptors.

mod features;
mod preprocess;
mod stft;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use features::{
    spectral_features, summarize_clip, temporal_features, ClipFeatures, ClipSummary, FeatureParams, SpectralFrames,
    TemporalFrames,
};
pub use preprocess::{downmix, percentile, preprocess, spectral_gate, PreprocessParams, Preprocessed};
pub use stft::{frame_count, hann_window, stft, Spectrogram};

#[derive(Debug, thiserror::Error)]
pub enum AcousticError {
    #[error("empty signal")]
    Empty,
    #[error("zero-energy signal")]
    ZeroEnergy,
    #[error("signal of {len} samples is shorter than one window of {needed}")]
    TooShort { len: usize, needed: usize },
    #[error("window length {0} must be a power of two >= 256")]
    InvalidWindow(usize),
    #[error("hop length {hop_len} must be in 1..={window_len}")]
    InvalidHop { hop_len: usize, window_len: usize },
    #[error("frame length {0} must be at least 2")]
    FrameTooShort(usize),
    #[error("rolloff fraction {0} outside (0, 1]")]
    InvalidRolloff(f64),
    #[error("no frame has nonzero spectral mass")]
    NoSpectralMass,
    #[error("expected mono input, got {0} channels")]
    NotMono(u16),
}

/// One row of `acoustic_features.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcousticFeatureVector {
    pub clip_id: String,
    pub room: u32,
    pub week: u32,
    pub day: Option<u32>,
    pub centroid_hz: f64,
    pub bandwidth_hz: f64,
    pub rolloff_hz: f64,
    pub zcr: f64,
    pub rms: f64,
    pub ste: f64,
}

impl AcousticFeatureVector {
    pub fn new(clip_id: &str, room: u32, week: u32, day: Option<u32>, f: &ClipFeatures<f64>) -> Self {
        Self {
            clip_id: clip_id.to_string(),
            room,
            week,
            day,
            centroid_hz: f.centroid_hz,
            bandwidth_hz: f.bandwidth_hz,
            rolloff_hz: f.rolloff_hz,
            zcr: f.zcr,
            rms: f.rms,
            ste: f.ste,
        }
    }

    pub fn features(&self) -> ClipFeatures<f64> {
        ClipFeatures {
            centroid_hz: self.centroid_hz,
            bandwidth_hz: self.bandwidth_hz,
            rolloff_hz: self.rolloff_hz,
            zcr: self.zcr,
            rms: self.rms,
            ste: self.ste,
        }
    }
}

pub const ACOUSTIC_HEADER: [&str; 10] = [
    "clip_id",
    "room",
    "week",
    "day",
    "centroid_hz",
    "bandwidth_hz",
    "rolloff_hz",
    "zcr",
    "rms",
    "ste",
];

pub fn write_acoustic_csv<W: Write>(rows: &[AcousticFeatureVector], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(ACOUSTIC_HEADER)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_acoustic_csv<R: std::io::Read>(input: R) -> csv::Result<Vec<AcousticFeatureVector>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input)
        .deserialize()
        .collect()
}
