//! Parsers for every on-disk input: WAV audio, PGM frame clips and the
//! CSV sensor tables. All parsers are pure functions of their input.

mod frames;
mod tables;
mod wav;

use std::path::PathBuf;

use thiserror::Error;

pub use frames::{load_frame_sequence, load_from_manifest, parse_pgm, write_pgm, Frame, FrameManifest, FrameSequence};
pub use tables::{
    parse_clip_list, parse_datetime, parse_env_csv, parse_event_log, parse_thermal_csv, write_clip_list, write_env_csv,
    write_events_csv, write_thermal_csv, ClipEntry, EnvRecord, EventKind, EventRecord, Parsed, Region, Session,
    ThermalRecord, CLIP_HEADER, ENV_HEADER, EVENT_HEADER, TEMP_BAND_C, THERMAL_HEADER,
};
pub use wav::{parse_wav, write_wav, AudioSignal};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("wav: {reason} (byte offset {offset})")]
    Wav { offset: usize, reason: String },
    #[error("pgm{}: {reason}", path.as_ref().map(|p| format!(" {}", p.display())).unwrap_or_default())]
    Pgm { path: Option<PathBuf>, reason: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("dimension mismatch at index {index}: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        index: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("fps must be positive, got {0}")]
    InvalidFps(f64),
    #[error("header mismatch: expected '{expected}', found '{found}'")]
    Header { expected: String, found: String },
    #[error("row {row}: {reason}")]
    Csv { row: usize, reason: String },
}

impl IngestError {
    pub fn is_io(&self) -> bool {
        matches!(self, IngestError::Io { .. })
    }
}
