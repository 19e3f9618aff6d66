//! Seeded synthetic multimodal datasets with planted weekly trends and a
//! ground-truth record of what was planted.
//!
//! All randomness comes from ChaCha8 streams keyed by `(seed, item)`, so the
//! output tree is byte-identical for a fixed config regardless of how work
//! is scheduled.

mod audio;
mod texture;
mod trend;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate, NaiveDateTime, NaiveTime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregate::{modality_of, Modality, FEATURE_NAMES};
use crate::ingest::{
    write_clip_list, write_env_csv, write_events_csv, write_pgm, write_thermal_csv, write_wav, AudioSignal, ClipEntry,
    EnvRecord, EventKind, EventRecord, FrameManifest, Region, Session, ThermalRecord,
};

pub use audio::{tone_clip, AudioSynthParams};
pub use texture::{fourier_texture, render_shifted, sample_wrap, shift_wrap, to_frame};
pub use trend::{TrendShape, TrendSpec};

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("invalid synth config: {0}")]
    InvalidConfig(String),
    #[error("infeasible coupling for {0}: latent covariance is not positive semi-definite")]
    InfeasibleCoupling(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Planned trajectories for every independently generated feature.
/// `zcr` is derived from the tone frequency as `2 f / sample_rate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantedTrends {
    pub flow_before: TrendSpec,
    pub flow_during: TrendSpec,
    pub flow_after: TrendSpec,
    pub spectral_centroid: TrendSpec,
    pub rms: TrendSpec,
    pub head_temp_mean: TrendSpec,
    pub foot_temp_mean: TrendSpec,
    pub ambient_temp: TrendSpec,
    pub rel_humidity: TrendSpec,
}

impl Default for PlantedTrends {
    fn default() -> Self {
        Self {
            flow_before: TrendSpec::flat(0.8, 0.08),
            flow_during: TrendSpec::plateau(3.0, 1.0, 5.0, 0.2),
            flow_after: TrendSpec::flat(0.9, 0.08),
            spectral_centroid: TrendSpec::linear(3500.0, 2000.0, 60.0),
            rms: TrendSpec::flat(0.1, 0.005),
            head_temp_mean: TrendSpec::linear(31.5, 32.5, 0.8),
            foot_temp_mean: TrendSpec::plateau(26.0, 34.0, 2.0, 0.8),
            ambient_temp: TrendSpec::flat(24.0, 0.5),
            rel_humidity: TrendSpec::flat(60.0, 1.5).with_weekly_sd(6.0),
        }
    }
}

impl PlantedTrends {
    pub fn get(&self, name: &str) -> Option<&TrendSpec> {
        Some(match name {
            "flow_before" => &self.flow_before,
            "flow_during" => &self.flow_during,
            "flow_after" => &self.flow_after,
            "spectral_centroid" => &self.spectral_centroid,
            "rms" => &self.rms,
            "head_temp_mean" => &self.head_temp_mean,
            "foot_temp_mean" => &self.foot_temp_mean,
            "ambient_temp" => &self.ambient_temp,
            "rel_humidity" => &self.rel_humidity,
            _ => return None,
        })
    }

    /// Constant trend everywhere and no noise, keeping the current levels' start values.
    pub fn constant_noiseless(&self) -> Self {
        let c = |t: &TrendSpec| TrendSpec::flat(t.start, 0.0);
        Self {
            flow_before: c(&self.flow_before),
            flow_during: c(&self.flow_during),
            flow_after: c(&self.flow_after),
            spectral_centroid: c(&self.spectral_centroid),
            rms: c(&self.rms),
            head_temp_mean: c(&self.head_temp_mean),
            foot_temp_mean: c(&self.foot_temp_mean),
            ambient_temp: c(&self.ambient_temp),
            rel_humidity: c(&self.rel_humidity),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coupling {
    pub feature_a: String,
    pub feature_b: String,
    pub r: f64,
}

/// How coupled targets are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CouplingMode {
    /// Residual orthogonalized against the sources over the analysis weeks, so
    /// the weekly latent correlation equals the target exactly.
    #[default]
    Exact,
    /// Plain Gaussian copula: target correlation holds in expectation.
    Sampled,
}

/// Week-level shift of every feature in the listed modalities, in units of
/// each feature's observation noise sd.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disturbance {
    pub week: u32,
    pub magnitude: f64,
    pub modalities: Vec<Modality>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VideoSynthParams {
    pub width: usize,
    pub height: usize,
    pub fps: f64,
    pub before_s: f64,
    pub during_s: f64,
    pub after_s: f64,
    /// Use 7 min / 90 s / 7 min segments instead of the short defaults.
    pub full_geometry: bool,
    pub min_wavelength_px: f64,
    pub max_wavelength_px: f64,
}

impl Default for VideoSynthParams {
    fn default() -> Self {
        Self {
            width: 128,
            height: 72,
            fps: 2.0,
            before_s: 20.0,
            during_s: 10.0,
            after_s: 20.0,
            full_geometry: false,
            min_wavelength_px: 6.0,
            max_wavelength_px: 24.0,
        }
    }
}

impl VideoSynthParams {
    /// `(before, during, after)` durations in seconds.
    pub fn segments(&self) -> (f64, f64, f64) {
        if self.full_geometry {
            (420.0, 90.0, 420.0)
        } else {
            (self.before_s, self.during_s, self.after_s)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub seed: u64,
    pub first_week: u32,
    pub last_week: u32,
    pub analysis_first_week: u32,
    pub analysis_last_week: u32,
    /// First week with usable video.
    pub video_first_week: u32,
    pub rooms: u32,
    /// Room carrying audio and video.
    pub analysis_room: u32,
    pub acoustic_clips_per_week: usize,
    pub flow_clips_per_week: usize,
    pub thermal_images_per_week: usize,
    pub am_pm_temp_offset_c: f64,
    pub am_pm_rh_offset_pct: f64,
    pub start_date: NaiveDate,
    pub audio: AudioSynthParams,
    pub video: VideoSynthParams,
    pub trends: PlantedTrends,
    pub couplings: Vec<Coupling>,
    pub coupling_mode: CouplingMode,
    pub disturbances: Vec<Disturbance>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            first_week: 1,
            last_week: 20,
            analysis_first_week: 5,
            analysis_last_week: 20,
            video_first_week: 5,
            rooms: 5,
            analysis_room: 1,
            acoustic_clips_per_week: 12,
            flow_clips_per_week: 3,
            thermal_images_per_week: 6,
            am_pm_temp_offset_c: 0.5,
            am_pm_rh_offset_pct: 2.0,
            start_date: NaiveDate::from_ymd_opt(2024, 3, 4).expect("valid date"),
            audio: AudioSynthParams::default(),
            video: VideoSynthParams::default(),
            trends: PlantedTrends::default(),
            couplings: vec![Coupling {
                feature_a: "zcr".into(),
                feature_b: "rel_humidity".into(),
                r: 0.7,
            }],
            coupling_mode: CouplingMode::Exact,
            disturbances: Vec::new(),
        }
    }
}

impl SynthConfig {
    pub fn weeks(&self) -> std::ops::RangeInclusive<u32> {
        self.first_week..=self.last_week
    }

    pub fn analysis_weeks(&self) -> Vec<u32> {
        self.weeks()
            .filter(|w| (self.analysis_first_week..=self.analysis_last_week).contains(w))
            .collect()
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidConfig(m));
        if self.first_week > self.last_week {
            return bad(format!(
                "first_week {} after last_week {}",
                self.first_week, self.last_week
            ));
        }
        if self.analysis_weeks().len() < 3 {
            return bad("fewer than 3 analysis weeks inside the generated range".into());
        }
        if self.rooms == 0 || !(1..=self.rooms).contains(&self.analysis_room) {
            return bad(format!(
                "analysis_room {} not in 1..={}",
                self.analysis_room, self.rooms
            ));
        }
        if self.audio.sample_rate == 0 || !(self.audio.clip_s > 0.0) {
            return bad("audio sample_rate and clip_s must be positive".into());
        }
        let v = &self.video;
        let (b, d, a) = v.segments();
        if !(v.fps > 0.0) || !(b > 0.0 && d > 0.0 && a > 0.0) || v.width < 16 || v.height < 16 {
            return bad("video needs positive fps and segment lengths and frames of at least 16x16".into());
        }
        for name in FEATURE_NAMES.iter().filter(|n| **n != "zcr") {
            self.trends.get(name).expect("planted feature").validate(name)?;
        }
        let nyquist = f64::from(self.audio.sample_rate) / 2.0;
        for w in self.weeks() {
            let f = self.trends.spectral_centroid.value(w, self.first_week, self.last_week);
            if f - self.audio.fm_depth_hz <= 0.0 || f + self.audio.fm_depth_hz >= nyquist {
                return bad(format!("tone frequency {f} Hz at week {w} leaves (0, Nyquist)"));
            }
        }
        let mut targets = BTreeSet::new();
        let mut sources = BTreeSet::new();
        for c in &self.couplings {
            for f in [&c.feature_a, &c.feature_b] {
                if !FEATURE_NAMES.contains(&f.as_str()) {
                    return bad(format!("unknown coupling feature '{f}'"));
                }
            }
            if !(c.r > -1.0 && c.r < 1.0) {
                return bad(format!("coupling target r {} outside (-1, 1)", c.r));
            }
            if c.feature_b == "zcr" {
                return bad("zcr is derived from the tone frequency and cannot be a coupling target".into());
            }
            if base_feature(&c.feature_a) == base_feature(&c.feature_b) {
                return bad(format!("coupling of {} with itself", c.feature_a));
            }
            if self.trends.get(&c.feature_b).expect("checked").weekly_sd <= 0.0 {
                return bad(format!("coupling target {} needs weekly_sd > 0", c.feature_b));
            }
            targets.insert(base_feature(&c.feature_b));
            sources.insert(base_feature(&c.feature_a));
        }
        if let Some(f) = targets.intersection(&sources).next() {
            return bad(format!("{f} is both a coupling source and a coupling target"));
        }
        for d in &self.disturbances {
            if !self.weeks().contains(&d.week) || !d.magnitude.is_finite() {
                return bad(format!(
                    "disturbance at week {} outside the schedule or non-finite",
                    d.week
                ));
            }
        }
        Ok(())
    }
}

fn base_feature(name: &str) -> &str {
    if name == "zcr" {
        "spectral_centroid"
    } else {
        name
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedCoupling {
    pub feature_a: String,
    pub feature_b: String,
    pub target_r: f64,
    /// Correlation of the weekly latent values over the analysis weeks.
    pub realized_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub weeks: Vec<u32>,
    pub analysis_weeks: Vec<u32>,
    /// Weekly latent (pre-observation-noise) value per table feature; `None`
    /// where the modality is not generated that week.
    pub features: BTreeMap<String, Vec<Option<f64>>>,
    pub couplings: Vec<PlantedCoupling>,
    /// Feature pairs with a planted dependence: couplings plus pairs of
    /// features that both carry a weekly trend.
    pub dependent_pairs: Vec<(String, String)>,
    pub events: Vec<Disturbance>,
}

impl GroundTruth {
    pub fn value(&self, feature: &str, week: u32) -> Option<f64> {
        let i = self.weeks.iter().position(|&w| w == week)?;
        self.features.get(feature)?.get(i).copied().flatten()
    }

    pub fn is_dependent(&self, a: &str, b: &str) -> bool {
        self.dependent_pairs
            .iter()
            .any(|(x, y)| (x == a && y == b) || (x == b && y == a))
    }
}

const STREAM_LATENT: u64 = 0;
const STREAM_AUDIO: u64 = 1;
const STREAM_VIDEO: u64 = 2;
const STREAM_THERMAL: u64 = 3;
const STREAM_ENV: u64 = 4;

fn stream(seed: u64, kind: u64, room: u32, week: u32, item: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((kind << 56) | (u64::from(room) << 40) | (u64::from(week) << 20) | item as u64);
    rng
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn pearson_r(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let sab: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let saa: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let sbb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    sab / (saa * sbb).sqrt()
}

/// Weekly latent values of every table feature over the full schedule.
struct Latent {
    weeks: Vec<u32>,
    values: BTreeMap<&'static str, Vec<f64>>,
    couplings: Vec<PlantedCoupling>,
}

impl Latent {
    fn at(&self, feature: &str, week: u32) -> f64 {
        let i = self.weeks.iter().position(|&w| w == week).expect("week in schedule");
        self.values[feature][i]
    }
}

fn draw_latent(cfg: &SynthConfig) -> Result<Latent, SynthError> {
    cfg.validate()?;
    let weeks: Vec<u32> = cfg.weeks().collect();
    let analysis = cfg.analysis_weeks();
    let aidx: Vec<usize> = analysis
        .iter()
        .map(|w| weeks.iter().position(|x| x == w).expect("analysis week in schedule"))
        .collect();
    let mut rng = stream(cfg.seed, STREAM_LATENT, 0, 0, 0);
    let mut values: BTreeMap<&'static str, Vec<f64>> = BTreeMap::new();
    for name in FEATURE_NAMES.iter().copied().filter(|n| *n != "zcr") {
        let t = cfg.trends.get(name).expect("planted feature");
        let v = weeks
            .iter()
            .map(|&w| t.value(w, cfg.first_week, cfg.last_week) + t.weekly_sd * normal(&mut rng))
            .collect();
        values.insert(name, v);
    }
    let sr = f64::from(cfg.audio.sample_rate);
    let zcr_of = |c: &[f64]| c.iter().map(|f| 2.0 * f / sr).collect::<Vec<f64>>();
    values.insert("zcr", zcr_of(&values["spectral_centroid"]));

    // couplings, grouped by target in order of first appearance
    let mut order: Vec<&str> = Vec::new();
    for c in &cfg.couplings {
        if !order.contains(&c.feature_b.as_str()) {
            order.push(&c.feature_b);
        }
    }
    for target in order {
        let links: Vec<&Coupling> = cfg.couplings.iter().filter(|c| c.feature_b == target).collect();
        let mut z_src_analysis = Vec::new();
        let mut z_src_all = Vec::new();
        for c in &links {
            let full = &values[c.feature_a.as_str()];
            let sub: Vec<f64> = aidx.iter().map(|&i| full[i]).collect();
            let n = sub.len() as f64;
            let m = sub.iter().sum::<f64>() / n;
            let sd = (sub.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
            if !(sd > 0.0) {
                return Err(SynthError::InvalidConfig(format!(
                    "coupling source {} is constant over the analysis weeks",
                    c.feature_a
                )));
            }
            z_src_analysis.push(sub.iter().map(|v| (v - m) / sd).collect::<Vec<f64>>());
            z_src_all.push(full.iter().map(|v| (v - m) / sd).collect::<Vec<f64>>());
        }
        let r: Vec<f64> = links.iter().map(|c| c.r).collect();
        let (beta, resid) = trend::coupling_weights(&z_src_analysis, &r, target)?;
        let mut e: Vec<f64> = (0..weeks.len()).map(|_| normal(&mut rng)).collect();
        if cfg.coupling_mode == CouplingMode::Exact {
            let sub: Vec<f64> = aidx.iter().map(|&i| e[i]).collect();
            let ortho = trend::orthogonal_residual(&sub, &z_src_analysis)
                .ok_or_else(|| SynthError::InfeasibleCoupling(target.to_string()))?;
            for (k, &i) in aidx.iter().enumerate() {
                e[i] = ortho[k];
            }
        }
        let t = cfg.trends.get(target).expect("validated");
        let level = analysis
            .iter()
            .map(|&w| t.value(w, cfg.first_week, cfg.last_week))
            .sum::<f64>()
            / analysis.len() as f64;
        let out: Vec<f64> = (0..weeks.len())
            .map(|i| {
                let z: f64 = beta.iter().zip(&z_src_all).map(|(b, zs)| b * zs[i]).sum::<f64>() + resid.sqrt() * e[i];
                level + t.weekly_sd * z
            })
            .collect();
        let key = FEATURE_NAMES.iter().copied().find(|n| *n == target).expect("validated");
        values.insert(key, out);
    }

    for d in &cfg.disturbances {
        let i = weeks.iter().position(|&w| w == d.week).expect("validated");
        for name in FEATURE_NAMES.iter().copied().filter(|n| *n != "zcr") {
            if d.modalities.contains(&modality_of(name).expect("table feature")) {
                let sd = cfg.trends.get(name).expect("planted").noise_sd;
                values.get_mut(name).expect("present")[i] += d.magnitude * sd;
            }
        }
    }
    values.insert("zcr", zcr_of(&values["spectral_centroid"]));

    let couplings = cfg
        .couplings
        .iter()
        .map(|c| {
            let a: Vec<f64> = aidx.iter().map(|&i| values[c.feature_a.as_str()][i]).collect();
            let b: Vec<f64> = aidx.iter().map(|&i| values[c.feature_b.as_str()][i]).collect();
            PlantedCoupling {
                feature_a: c.feature_a.clone(),
                feature_b: c.feature_b.clone(),
                target_r: c.r,
                realized_r: pearson_r(&a, &b),
            }
        })
        .collect();
    Ok(Latent {
        weeks,
        values,
        couplings,
    })
}

fn trended_features(cfg: &SynthConfig) -> BTreeSet<&'static str> {
    let analysis = cfg.analysis_weeks();
    let mut set: BTreeSet<&'static str> = FEATURE_NAMES
        .iter()
        .copied()
        .filter(|&n| {
            let t = cfg.trends.get(base_feature(n)).expect("planted");
            let v: Vec<f64> = analysis
                .iter()
                .map(|&w| t.value(w, cfg.first_week, cfg.last_week))
                .collect();
            v.iter().any(|x| (x - v[0]).abs() > 1e-12 * v[0].abs().max(1.0))
        })
        .collect();
    // a coupling target inherits a trend from a trended source
    loop {
        let before = set.len();
        for c in &cfg.couplings {
            if set.contains(c.feature_a.as_str()) {
                if let Some(n) = FEATURE_NAMES.iter().copied().find(|n| *n == c.feature_b) {
                    set.insert(n);
                }
            }
        }
        if set.len() == before {
            break;
        }
    }
    set
}

fn truth_from(cfg: &SynthConfig, latent: &Latent) -> GroundTruth {
    let features = FEATURE_NAMES
        .iter()
        .map(|&n| {
            let flow = modality_of(n) == Some(Modality::Flow);
            let v = latent
                .weeks
                .iter()
                .map(|&w| {
                    if flow && (w < cfg.video_first_week || cfg.flow_clips_per_week == 0) {
                        None
                    } else {
                        Some(latent.at(n, w))
                    }
                })
                .collect();
            (n.to_string(), v)
        })
        .collect();
    let trended = trended_features(cfg);
    let mut dependent: BTreeSet<(String, String)> = BTreeSet::new();
    let mut add = |a: &str, b: &str| {
        let ia = FEATURE_NAMES.iter().position(|n| *n == a).expect("table feature");
        let ib = FEATURE_NAMES.iter().position(|n| *n == b).expect("table feature");
        let (x, y) = if ia < ib { (a, b) } else { (b, a) };
        dependent.insert((x.to_string(), y.to_string()));
    };
    for c in &cfg.couplings {
        add(&c.feature_a, &c.feature_b);
    }
    for (i, a) in FEATURE_NAMES.iter().enumerate() {
        for b in &FEATURE_NAMES[i + 1..] {
            if trended.contains(a) && trended.contains(b) {
                add(a, b);
            }
        }
    }
    // zcr is a deterministic function of the centroid
    add("spectral_centroid", "zcr");
    GroundTruth {
        seed: cfg.seed,
        weeks: latent.weeks.clone(),
        analysis_weeks: cfg.analysis_weeks(),
        features,
        couplings: latent.couplings.clone(),
        dependent_pairs: dependent.into_iter().collect(),
        events: cfg.disturbances.clone(),
    }
}

/// The planted weekly values and couplings, without writing anything.
pub fn planted_truth(cfg: &SynthConfig) -> Result<GroundTruth, SynthError> {
    let latent = draw_latent(cfg)?;
    Ok(truth_from(cfg, &latent))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), SynthError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| SynthError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, bytes).map_err(|source| SynthError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn week_date(cfg: &SynthConfig, week: u32, day: u32) -> NaiveDate {
    cfg.start_date + Duration::days(i64::from(week) * 7 + i64::from(day))
}

fn at(date: NaiveDate, h: u32, m: u32) -> NaiveDateTime {
    date.and_time(NaiveTime::from_hms_opt(h, m, 0).expect("valid time"))
}

fn thermal_records(cfg: &SynthConfig, latent: &Latent) -> Vec<ThermalRecord> {
    let mut out = Vec::new();
    for room in 1..=cfg.rooms {
        for w in cfg.weeks() {
            let mut rng = stream(cfg.seed, STREAM_THERMAL, room, w, 0);
            for img in 0..cfg.thermal_images_per_week {
                let date = week_date(cfg, w, (img % 7) as u32);
                for (region, name) in [(Region::Head, "head_temp_mean"), (Region::Foot, "foot_temp_mean")] {
                    let sd = cfg.trends.get(name).expect("planted").noise_sd;
                    let mean = latent.at(name, w) + sd * normal(&mut rng);
                    let lo = 1.0 + 0.5 * rng.random::<f64>();
                    let hi = 1.5 + 0.5 * rng.random::<f64>();
                    out.push(ThermalRecord {
                        room,
                        week: w,
                        capture_date: date,
                        region,
                        t_min_c: round2(mean - lo),
                        t_max_c: round2(mean + hi),
                        t_mean_c: round2(mean),
                    });
                }
            }
        }
    }
    out
}

fn env_records(cfg: &SynthConfig, latent: &Latent) -> Vec<EnvRecord> {
    let mut out = Vec::new();
    let temp_sd = cfg.trends.ambient_temp.noise_sd;
    let rh_sd = cfg.trends.rel_humidity.noise_sd;
    for room in 1..=cfg.rooms {
        for w in cfg.weeks() {
            let mut rng = stream(cfg.seed, STREAM_ENV, room, w, 0);
            for day in 0..7 {
                for (session, sign) in [(Session::AM, -1.0), (Session::PM, 1.0)] {
                    let temp =
                        latent.at("ambient_temp", w) + sign * cfg.am_pm_temp_offset_c + temp_sd * normal(&mut rng);
                    let rh = latent.at("rel_humidity", w) - sign * cfg.am_pm_rh_offset_pct + rh_sd * normal(&mut rng);
                    let co2 = (1500.0 + 100.0 * normal(&mut rng)).round();
                    let mut extras = BTreeMap::new();
                    extras.insert("co2_ppm".to_string(), format!("{co2}"));
                    out.push(EnvRecord {
                        room,
                        date: week_date(cfg, w, day),
                        week: w,
                        session,
                        temp_c: round2(temp),
                        rh_pct: round2(rh.clamp(0.0, 100.0)),
                        extras,
                    });
                }
            }
        }
    }
    out
}

struct AudioClip {
    entry: ClipEntry,
    wav: Vec<u8>,
}

fn audio_clip(cfg: &SynthConfig, latent: &Latent, week: u32, idx: usize) -> AudioClip {
    let room = cfg.analysis_room;
    let mut rng = stream(cfg.seed, STREAM_AUDIO, room, week, idx);
    let f0 = latent.at("spectral_centroid", week) + cfg.trends.spectral_centroid.noise_sd * normal(&mut rng);
    let rms = (latent.at("rms", week) + cfg.trends.rms.noise_sd * normal(&mut rng)).max(1e-4);
    let samples = tone_clip(f0, rms, &cfg.audio, &mut rng);
    let clip_id = format!("r{room}_w{week:02}_a{idx:02}");
    let wav = write_wav(&AudioSignal::mono(samples, cfg.audio.sample_rate));
    AudioClip {
        entry: ClipEntry {
            path: format!("{clip_id}.wav"),
            clip_id,
            room,
            week,
            day: (idx % 7) as u32,
        },
        wav,
    }
}

struct VideoClip {
    clip_id: String,
    manifest: FrameManifest,
    frames: Vec<Vec<u8>>,
    entry: EventRecord,
}

fn video_clip(cfg: &SynthConfig, latent: &Latent, week: u32, idx: usize) -> VideoClip {
    let room = cfg.analysis_room;
    let v = &cfg.video;
    let mut rng = stream(cfg.seed, STREAM_VIDEO, room, week, idx);
    let (before_s, during_s, after_s) = v.segments();
    let mut step = [(0.0, 0.0); 3];
    for (k, name) in ["flow_before", "flow_during", "flow_after"].iter().enumerate() {
        let sd = cfg.trends.get(name).expect("planted").noise_sd;
        let m = (latent.at(name, week) + sd * normal(&mut rng)).max(0.0);
        let theta = rng.random::<f64>() * std::f64::consts::TAU;
        step[k] = (m * theta.cos(), m * theta.sin());
    }
    let tex = fourier_texture(
        2 * v.width,
        2 * v.height,
        v.min_wavelength_px,
        v.max_wavelength_px,
        &mut rng,
    );
    let n_frames = ((before_s + during_s + after_s) * v.fps).round() as usize + 1;
    let mut offset = (
        rng.random::<f64>() * tex.width as f64,
        rng.random::<f64>() * tex.height as f64,
    );
    let mut frames = Vec::with_capacity(n_frames);
    for i in 0..n_frames {
        if i > 0 {
            let mid = (i as f64 - 0.5) / v.fps;
            let k = if mid < before_s {
                0
            } else if mid < before_s + during_s {
                1
            } else {
                2
            };
            offset.0 += step[k].0;
            offset.1 += step[k].1;
        }
        let img = render_shifted(&tex, v.width, v.height, offset.0, offset.1);
        frames.push(write_pgm(&to_frame(&img)));
    }
    let clip_id = format!("r{room}_w{week:02}_v{idx:02}");
    let day = [1u32, 3, 5][idx % 3];
    let start = at(week_date(cfg, week, day), 10, 0) + Duration::minutes(30 * (idx / 3) as i64);
    let entry_time = start + Duration::milliseconds((before_s * 1000.0).round() as i64);
    VideoClip {
        manifest: FrameManifest {
            fps: v.fps,
            width: v.width,
            height: v.height,
            frames: (0..n_frames).map(|i| format!("frame_{i:04}.pgm")).collect(),
            room,
            week,
            clip_id: clip_id.clone(),
            day: Some(day),
            start_time: Some(start),
            timestamps: None,
        },
        clip_id,
        frames,
        entry: EventRecord {
            room,
            timestamp: entry_time,
            week,
            kind: EventKind::CaretakerEntry,
            note: "routine".into(),
        },
    }
}

/// Writes a full dataset under `out_dir` and returns its ground truth.
///
/// Layout: `thermal.csv`, `env.csv`, `events.csv`, `audio/clips.csv` with one
/// WAV per clip, `video/<clip_id>/manifest.json` with PGM frames,
/// `ground_truth.json`, and `pipeline.json` holding the entry duration that
/// matches the generated video geometry.
pub fn generate_dataset(cfg: &SynthConfig, out_dir: &Path) -> Result<GroundTruth, SynthError> {
    let latent = draw_latent(cfg)?;
    let truth = truth_from(cfg, &latent);
    fs::create_dir_all(out_dir).map_err(|source| SynthError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;

    write_file(
        &out_dir.join("thermal.csv"),
        write_thermal_csv(&thermal_records(cfg, &latent)).as_bytes(),
    )?;
    write_file(
        &out_dir.join("env.csv"),
        write_env_csv(&env_records(cfg, &latent)).as_bytes(),
    )?;

    let audio_dir = out_dir.join("audio");
    let mut clip_list = Vec::new();
    for w in cfg.weeks() {
        let clips: Vec<AudioClip> = (0..cfg.acoustic_clips_per_week)
            .into_par_iter()
            .map(|i| audio_clip(cfg, &latent, w, i))
            .collect();
        for c in clips {
            write_file(&audio_dir.join(&c.entry.path), &c.wav)?;
            clip_list.push(c.entry);
        }
    }
    write_file(&audio_dir.join("clips.csv"), write_clip_list(&clip_list).as_bytes())?;

    let mut events = Vec::new();
    let video_dir = out_dir.join("video");
    if cfg.flow_clips_per_week > 0 {
        for w in cfg.weeks().filter(|&w| w >= cfg.video_first_week) {
            let clips: Vec<VideoClip> = (0..cfg.flow_clips_per_week)
                .into_par_iter()
                .map(|i| video_clip(cfg, &latent, w, i))
                .collect();
            for c in clips {
                let dir = video_dir.join(&c.clip_id);
                for (name, bytes) in c.manifest.frames.iter().zip(&c.frames) {
                    write_file(&dir.join(name), bytes)?;
                }
                let json = serde_json::to_string_pretty(&c.manifest).expect("manifest serializes");
                write_file(&dir.join("manifest.json"), json.as_bytes())?;
                events.push(c.entry);
            }
        }
    }
    for d in &cfg.disturbances {
        let names: Vec<&str> = d.modalities.iter().map(|m| m.as_str()).collect();
        events.push(EventRecord {
            room: cfg.analysis_room,
            timestamp: at(week_date(cfg, d.week, 0), 12, 0),
            week: d.week,
            kind: EventKind::Maintenance,
            note: format!("disturbance magnitude {} affecting {}", d.magnitude, names.join(" ")),
        });
    }
    events.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then(a.room.cmp(&b.room)));
    write_file(&out_dir.join("events.csv"), write_events_csv(&events).as_bytes())?;

    let (_, during_s, _) = cfg.video.segments();
    let pipeline = serde_json::json!({ "flow": { "entry_duration_s": during_s } });
    let json = serde_json::to_string_pretty(&pipeline).expect("json");
    write_file(&out_dir.join("pipeline.json"), json.as_bytes())?;
    let json = serde_json::to_string_pretty(&truth).expect("ground truth serializes");
    write_file(&out_dir.join("ground_truth.json"), json.as_bytes())?;
    Ok(truth)
}
