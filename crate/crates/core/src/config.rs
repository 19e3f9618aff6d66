//! Strict JSON configuration for the end-to-end pipeline.
//!
//! Every section has defaults, unknown keys are rejected, and
//! [`PipelineConfig::validate`] runs before any work starts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::acoustic::{FeatureParams, PreprocessParams};
use crate::aggregate::ContrastParams;
use crate::flow::{DisParams, SegmentParams};
use crate::stats::LeveneCenter;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl ConfigError {
    pub fn is_io(&self) -> bool {
        matches!(self, ConfigError::Io { .. })
    }
}

/// Input locations relative to the data directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Paths {
    pub thermal: PathBuf,
    pub env: PathBuf,
    pub events: PathBuf,
    pub audio_clips: PathBuf,
    pub video_dir: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Self {
            thermal: "thermal.csv".into(),
            env: "env.csv".into(),
            events: "events.csv".into(),
            audio_clips: "audio/clips.csv".into(),
            video_dir: "video".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AcousticConfig {
    pub window_len: usize,
    pub hop_len: usize,
    pub rolloff_fraction: f64,
    pub frame_ms: f64,
    pub frame_hop_ms: f64,
    /// 0 turns spectral gating off.
    pub gate_strength: f64,
    pub noise_percentile: f64,
    pub gain_smoothing_bins: usize,
    pub target_rms: f64,
    pub normalize_rms: bool,
}

impl Default for AcousticConfig {
    fn default() -> Self {
        let f = FeatureParams::default();
        let p = PreprocessParams::default();
        Self {
            window_len: f.window_len,
            hop_len: f.hop_len,
            rolloff_fraction: f.rolloff_fraction,
            frame_ms: f.frame_ms,
            frame_hop_ms: f.frame_hop_ms,
            gate_strength: p.gate_strength,
            noise_percentile: p.noise_percentile,
            gain_smoothing_bins: p.gain_smoothing_bins,
            target_rms: p.target_rms,
            normalize_rms: p.normalize_rms,
        }
    }
}

impl AcousticConfig {
    pub fn features(&self) -> FeatureParams {
        FeatureParams {
            window_len: self.window_len,
            hop_len: self.hop_len,
            rolloff_fraction: self.rolloff_fraction,
            frame_ms: self.frame_ms,
            frame_hop_ms: self.frame_hop_ms,
        }
    }

    pub fn preprocess(&self) -> PreprocessParams {
        PreprocessParams {
            window_len: self.window_len,
            hop_len: self.hop_len,
            gate_strength: self.gate_strength,
            noise_percentile: self.noise_percentile,
            gain_smoothing_bins: self.gain_smoothing_bins,
            target_rms: self.target_rms,
            normalize_rms: self.normalize_rms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlowConfig {
    pub pyramid_levels: usize,
    pub patch_size: usize,
    pub patch_stride: usize,
    pub iterations: usize,
    pub texture_floor: f64,
    pub working_height: usize,
    /// Entry length assumed when the event log gives only the start.
    pub entry_duration_s: f64,
    pub pre_window_s: f64,
    pub post_window_s: f64,
    pub min_window_s: f64,
    pub block_s: f64,
    pub min_partial_block_s: f64,
    pub first_video_week: u32,
}

impl Default for FlowConfig {
    fn default() -> Self {
        let d = DisParams::default();
        let s = SegmentParams::default();
        Self {
            pyramid_levels: d.pyramid_levels,
            patch_size: d.patch_size,
            patch_stride: d.patch_stride,
            iterations: d.iterations,
            texture_floor: d.texture_floor,
            working_height: d.working_height,
            entry_duration_s: 90.0,
            pre_window_s: s.pre_window_s,
            post_window_s: s.post_window_s,
            min_window_s: s.min_window_s,
            block_s: s.block_s,
            min_partial_block_s: s.min_partial_block_s,
            first_video_week: 5,
        }
    }
}

impl FlowConfig {
    pub fn dis(&self) -> DisParams {
        DisParams {
            pyramid_levels: self.pyramid_levels,
            patch_size: self.patch_size,
            patch_stride: self.patch_stride,
            iterations: self.iterations,
            texture_floor: self.texture_floor,
            working_height: self.working_height,
        }
    }

    pub fn segments(&self) -> SegmentParams {
        SegmentParams {
            pre_window_s: self.pre_window_s,
            post_window_s: self.post_window_s,
            min_window_s: self.min_window_s,
            block_s: self.block_s,
            min_partial_block_s: self.min_partial_block_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatsConfig {
    pub alpha: f64,
    pub q_threshold: f64,
    pub levene_center: LeveneCenter,
    pub early_weeks: (u32, u32),
    pub late_weeks: (u32, u32),
}

impl Default for StatsConfig {
    fn default() -> Self {
        let c = ContrastParams::default();
        Self {
            alpha: 0.05,
            q_threshold: 0.05,
            levene_center: LeveneCenter::Mean,
            early_weeks: c.early_weeks,
            late_weeks: c.late_weeks,
        }
    }
}

impl StatsConfig {
    pub fn contrast(&self) -> ContrastParams {
        ContrastParams {
            early_weeks: self.early_weeks,
            late_weeks: self.late_weeks,
        }
    }
}

/// Which room and weeks form the weekly feature table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    pub room: u32,
    pub first_week: u32,
    pub last_week: u32,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            room: 1,
            first_week: 5,
            last_week: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReportConfig {
    pub enabled: bool,
    pub width: u32,
    pub height: u32,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            width: 720,
            height: 420,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub paths: Paths,
    pub acoustic: AcousticConfig,
    pub flow: FlowConfig,
    pub stats: StatsConfig,
    pub analysis: AnalysisConfig,
    pub report: ReportConfig,
}

impl PipelineConfig {
    pub fn from_json(text: &str, path: &Path) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, path)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut problems = Vec::new();
        let a = &self.acoustic;
        if a.window_len < 256 || !a.window_len.is_power_of_two() {
            problems.push(format!(
                "acoustic.window_len {} must be a power of two >= 256",
                a.window_len
            ));
        }
        if a.hop_len == 0 || a.hop_len > a.window_len {
            problems.push(format!("acoustic.hop_len {} must be in 1..=window_len", a.hop_len));
        }
        if !(a.rolloff_fraction > 0.0 && a.rolloff_fraction <= 1.0) {
            problems.push(format!(
                "acoustic.rolloff_fraction {} outside (0, 1]",
                a.rolloff_fraction
            ));
        }
        if !(a.frame_ms > 0.0 && a.frame_hop_ms > 0.0) {
            problems.push("acoustic.frame_ms and frame_hop_ms must be positive".into());
        }
        if !(a.gate_strength >= 0.0 && a.gate_strength.is_finite()) {
            problems.push(format!("acoustic.gate_strength {} must be >= 0", a.gate_strength));
        }
        if !(0.0..=100.0).contains(&a.noise_percentile) {
            problems.push(format!(
                "acoustic.noise_percentile {} outside [0, 100]",
                a.noise_percentile
            ));
        }
        if a.gain_smoothing_bins == 0 {
            problems.push("acoustic.gain_smoothing_bins must be >= 1".into());
        }
        if !(a.target_rms > 0.0 && a.target_rms <= 1.0) {
            problems.push(format!("acoustic.target_rms {} outside (0, 1]", a.target_rms));
        }
        let f = &self.flow;
        if let Err(e) = f.dis().validate() {
            problems.push(format!("flow: {e}"));
        }
        if f.iterations == 0 {
            problems.push("flow.iterations must be >= 1".into());
        }
        for (name, v) in [
            ("entry_duration_s", f.entry_duration_s),
            ("pre_window_s", f.pre_window_s),
            ("post_window_s", f.post_window_s),
            ("block_s", f.block_s),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                problems.push(format!("flow.{name} {v} must be positive"));
            }
        }
        let s = &self.stats;
        for (name, v) in [("alpha", s.alpha), ("q_threshold", s.q_threshold)] {
            if !(v > 0.0 && v < 1.0) {
                problems.push(format!("stats.{name} {v} outside (0, 1)"));
            }
        }
        for (name, (lo, hi)) in [("early_weeks", s.early_weeks), ("late_weeks", s.late_weeks)] {
            if lo > hi {
                problems.push(format!("stats.{name} [{lo}, {hi}] is empty"));
            }
        }
        if self.analysis.first_week > self.analysis.last_week {
            problems.push("analysis.first_week after analysis.last_week".into());
        }
        if self.report.width < 200 || self.report.height < 150 {
            problems.push("report width/height too small (min 200x150)".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(problems.join("; ")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        PipelineConfig::default().validate().unwrap();
    }

    #[test]
    fn partial_json_keeps_defaults() {
        let c = PipelineConfig::from_json(r#"{"flow": {"entry_duration_s": 10}}"#, Path::new("c.json")).unwrap();
        assert_eq!(c.flow.entry_duration_s, 10.0);
        assert_eq!(c.flow.patch_size, 8);
        assert_eq!(c.acoustic.window_len, 2048);
    }

    #[test]
    fn unknown_keys_rejected() {
        let e = PipelineConfig::from_json(r#"{"acoustic": {"windw_len": 1024}}"#, Path::new("c.json")).unwrap_err();
        assert!(e.to_string().contains("windw_len"), "{e}");
    }

    #[test]
    fn invalid_values_listed() {
        let mut c = PipelineConfig::default();
        c.acoustic.window_len = 1000;
        c.stats.q_threshold = 1.5;
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("window_len") && msg.contains("q_threshold"), "{msg}");
    }
}
