//! Pre-extracted grayscale video frames: binary PGM files plus a JSON manifest.

use std::path::{Path, PathBuf};

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use super::IngestError;

/// One 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Frame {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, IngestError> {
        if pixels.len() != width * height {
            return Err(IngestError::Pgm {
                path: None,
                reason: format!("pixel count {} != {width} x {height}", pixels.len()),
            });
        }
        Ok(Self { width, height, pixels })
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }
}

/// On-disk manifest describing one clip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameManifest {
    pub fps: f64,
    pub width: usize,
    pub height: usize,
    /// Frame file names, relative to the manifest's directory.
    pub frames: Vec<String>,
    pub room: u32,
    pub week: u32,
    pub clip_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub day: Option<u32>,
    /// Wall-clock time of the first frame, used to place logged events.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_time: Option<NaiveDateTime>,
    /// Explicit per-frame timestamps in seconds; synthesised from `fps` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamps: Option<Vec<f64>>,
}

/// A decoded clip.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence {
    pub frames: Vec<Frame>,
    pub fps: f64,
    pub width: usize,
    pub height: usize,
    pub timestamps: Vec<f64>,
    pub room: u32,
    pub week: u32,
    pub day: Option<u32>,
    pub clip_id: String,
    pub start_time: Option<NaiveDateTime>,
}

impl FrameSequence {
    /// Span covered by the frames, `last - first` timestamp.
    pub fn duration_s(&self) -> f64 {
        match (self.timestamps.first(), self.timestamps.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }
}

fn skip_ws_and_comments(bytes: &[u8], mut pos: usize) -> usize {
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
        } else {
            return pos;
        }
    }
}

fn header_int(bytes: &[u8], pos: &mut usize) -> Result<usize, String> {
    *pos = skip_ws_and_comments(bytes, *pos);
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| format!("bad header field at byte {start}"))
}

/// Decodes a binary (P5) PGM with maxval <= 255.
pub fn parse_pgm(bytes: &[u8]) -> Result<Frame, IngestError> {
    let err = |reason: String| IngestError::Pgm { path: None, reason };
    if bytes.len() < 2 || &bytes[0..2] != b"P5" {
        return Err(err("non-P5 magic".into()));
    }
    let mut pos = 2;
    let width = header_int(bytes, &mut pos).map_err(err)?;
    let height = header_int(bytes, &mut pos).map_err(err)?;
    let maxval = header_int(bytes, &mut pos).map_err(err)?;
    if maxval == 0 || maxval > 255 {
        return Err(err(format!("unsupported bit depth (maxval {maxval})")));
    }
    // single whitespace byte separates header and raster
    pos += 1;
    let n = width * height;
    if bytes.len() < pos + n {
        return Err(err(format!(
            "truncated raster: need {n} bytes, have {}",
            bytes.len().saturating_sub(pos)
        )));
    }
    Frame::new(width, height, bytes[pos..pos + n].to_vec())
}

pub fn write_pgm(frame: &Frame) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", frame.width, frame.height).into_bytes();
    out.extend_from_slice(&frame.pixels);
    out
}

/// Loads every frame named in a manifest and validates geometry and timing.
pub fn load_frame_sequence(manifest_path: &Path) -> Result<FrameSequence, IngestError> {
    let text = std::fs::read_to_string(manifest_path).map_err(|source| IngestError::Io {
        path: manifest_path.to_path_buf(),
        source,
    })?;
    let manifest: FrameManifest =
        serde_json::from_str(&text).map_err(|e| IngestError::Manifest(format!("{}: {e}", manifest_path.display())))?;
    let dir = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    load_from_manifest(&manifest, dir)
}

pub fn load_from_manifest(manifest: &FrameManifest, dir: &Path) -> Result<FrameSequence, IngestError> {
    if !(manifest.fps > 0.0 && manifest.fps.is_finite()) {
        return Err(IngestError::InvalidFps(manifest.fps));
    }
    if manifest.frames.is_empty() {
        return Err(IngestError::Manifest("manifest lists no frames".into()));
    }
    let mut frames = Vec::with_capacity(manifest.frames.len());
    for (index, name) in manifest.frames.iter().enumerate() {
        let path: PathBuf = dir.join(name);
        let bytes = std::fs::read(&path).map_err(|source| IngestError::Io {
            path: path.clone(),
            source,
        })?;
        let frame = parse_pgm(&bytes).map_err(|e| match e {
            IngestError::Pgm { reason, .. } => IngestError::Pgm {
                path: Some(path.clone()),
                reason,
            },
            other => other,
        })?;
        if frame.width != manifest.width || frame.height != manifest.height {
            return Err(IngestError::DimensionMismatch {
                index,
                expected: (manifest.width, manifest.height),
                found: (frame.width, frame.height),
            });
        }
        frames.push(frame);
    }
    let timestamps = match &manifest.timestamps {
        Some(ts) => {
            if ts.len() != frames.len() {
                return Err(IngestError::Manifest(format!(
                    "{} timestamps for {} frames",
                    ts.len(),
                    frames.len()
                )));
            }
            let step = 1.0 / manifest.fps;
            for (i, w) in ts.windows(2).enumerate() {
                let dt = w[1] - w[0];
                if !(dt > 0.0) || (dt - step).abs() > 0.01 * step {
                    return Err(IngestError::Manifest(format!(
                        "timestamp step {dt} at index {} inconsistent with fps {}",
                        i + 1,
                        manifest.fps
                    )));
                }
            }
            ts.clone()
        }
        None => (0..frames.len()).map(|i| i as f64 / manifest.fps).collect(),
    };
    Ok(FrameSequence {
        frames,
        fps: manifest.fps,
        width: manifest.width,
        height: manifest.height,
        timestamps,
        room: manifest.room,
        week: manifest.week,
        day: manifest.day,
        clip_id: manifest.clip_id.clone(),
        start_time: manifest.start_time,
    })
}
