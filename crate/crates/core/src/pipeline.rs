//! Stage drivers shared by the CLI subcommands and the end-to-end run.
//!
//! Per-clip work runs in parallel; every collection is returned in input
//! order and every file is written from a single sequence, so outputs are
//! byte-stable for fixed inputs and configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acoustic::{preprocess, summarize_clip, write_acoustic_csv, AcousticError, AcousticFeatureVector};
use crate::aggregate::{
    build_feature_table, correlate_all, early_late_contrast, thermal_feature, trajectory_panel, weekly_acoustic,
    weekly_env, weekly_flow, weekly_thermal, write_correlations_csv, write_feature_table, write_weekly_summaries,
    AggregateError, ContrastResult, CorrelationReport, Modality, TrajectoryPanel, WeekConditionMeans,
    WeeklyFeatureTable, WeeklySummary,
};
use crate::config::{ConfigError, PipelineConfig};
use crate::flow::{
    clip_motion_series, condition_intensity, entry_window, segment_clip_with, write_flow_csv, Condition, FlowError,
    FlowIntensityRow,
};
use crate::ingest::{
    load_frame_sequence, parse_clip_list, parse_env_csv, parse_event_log, parse_thermal_csv, parse_wav, EnvRecord,
    EventRecord, IngestError, Region, ThermalRecord,
};
use crate::report;
use crate::stats::{
    anova_oneway, kruskal_wallis, levene, paired_t, shapiro_wilk, tukey_hsd, AnovaResult, Df, LeveneCenter, StatsError,
    TestResult,
};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("clip {clip}: {source}")]
    Acoustic {
        clip: String,
        #[source]
        source: AcousticError,
    },
    #[error("clip {clip}: {source}")]
    Flow {
        clip: String,
        #[source]
        source: FlowError,
    },
    #[error(transparent)]
    Aggregate(#[from] AggregateError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

impl PipelineError {
    /// Failures caused by unreadable or unwritable paths rather than bad content.
    pub fn is_io(&self) -> bool {
        match self {
            PipelineError::Io { .. } => true,
            PipelineError::Config(e) => e.is_io(),
            PipelineError::Ingest(e) => e.is_io(),
            _ => false,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn read_text(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(io_err(path))
}

/// Writes `bytes`, creating parent directories.
pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, bytes).map_err(io_err(path))
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing CSV to memory cannot fail");
    buf
}

pub fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

/// Per-clip quality-control numbers from preprocessing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioQc {
    pub clip_id: String,
    pub clipped_fraction: f64,
    pub skipped_frames: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AudioExtraction {
    pub features: Vec<AcousticFeatureVector>,
    pub qc: Vec<AudioQc>,
}

/// Preprocesses and summarizes every clip in the clip list.
pub fn extract_audio(clip_list: &Path, cfg: &PipelineConfig) -> Result<AudioExtraction, PipelineError> {
    let entries = parse_clip_list(&read_text(clip_list)?)?;
    let base = clip_list.parent().unwrap_or(Path::new("."));
    let pre = cfg.acoustic.preprocess();
    let feat = cfg.acoustic.features();
    let results: Vec<(AcousticFeatureVector, AudioQc)> = entries
        .par_iter()
        .map(|e| {
            let path = base.join(&e.path);
            let bytes = fs::read(&path).map_err(io_err(&path))?;
            let signal = parse_wav(&bytes).map_err(|err| match err {
                IngestError::Wav { offset, reason } => {
                    PipelineError::Invalid(format!("{}: {reason} at byte {offset}", path.display()))
                }
                other => other.into(),
            })?;
            let wrap = |source| PipelineError::Acoustic {
                clip: e.clip_id.clone(),
                source,
            };
            let clean = preprocess(&signal, &pre).map_err(wrap)?;
            let summary = summarize_clip(&clean.signal, &feat).map_err(wrap)?;
            Ok((
                AcousticFeatureVector::new(&e.clip_id, e.room, e.week, Some(e.day), &summary.features),
                AudioQc {
                    clip_id: e.clip_id.clone(),
                    clipped_fraction: clean.clipped_fraction,
                    skipped_frames: summary.skipped_frames,
                },
            ))
        })
        .collect::<Result<_, PipelineError>>()?;
    let (features, qc) = results.into_iter().unzip();
    Ok(AudioExtraction { features, qc })
}

pub fn load_thermal(path: &Path) -> Result<Vec<ThermalRecord>, PipelineError> {
    Ok(parse_thermal_csv(&read_text(path)?)?)
}

pub fn load_env(path: &Path) -> Result<Vec<EnvRecord>, PipelineError> {
    Ok(parse_env_csv(&read_text(path)?)?)
}

/// Event log records plus parse warnings.
pub fn load_events(path: &Path) -> Result<(Vec<EventRecord>, Vec<String>), PipelineError> {
    let parsed = parse_event_log(&read_text(path)?)?;
    Ok((parsed.records, parsed.warnings))
}

/// Entry segmentation actually used for one clip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub clip_id: String,
    pub room: u32,
    pub week: u32,
    pub entry_start_s: f64,
    pub entry_end_s: f64,
    pub before_short: bool,
    pub during_short: bool,
    pub after_short: bool,
    pub frame_pairs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowExtraction {
    pub rows: Vec<FlowIntensityRow>,
    pub segments: Vec<SegmentRecord>,
    pub warnings: Vec<String>,
}

/// Manifest paths `<video_dir>/*/manifest.json`, sorted.
pub fn find_manifests(video_dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(video_dir).map_err(io_err(video_dir))? {
        let entry = entry.map_err(io_err(video_dir))?;
        let m = entry.path().join("manifest.json");
        if m.is_file() {
            out.push(m);
        }
    }
    out.sort();
    Ok(out)
}

/// Motion intensity per entry condition for each manifest.
///
/// Clips without a logged caretaker entry are skipped with a warning.
pub fn extract_flow(
    manifests: &[PathBuf],
    events: &[EventRecord],
    cfg: &PipelineConfig,
) -> Result<FlowExtraction, PipelineError> {
    let dis = cfg.flow.dis();
    let seg_params = cfg.flow.segments();
    let mut out = FlowExtraction {
        rows: Vec::new(),
        segments: Vec::new(),
        warnings: Vec::new(),
    };
    let mut short = 0;
    for path in manifests {
        let seq = load_frame_sequence(path)?;
        let wrap = |source| PipelineError::Flow {
            clip: seq.clip_id.clone(),
            source,
        };
        let (start, end) = match entry_window(&seq, events, cfg.flow.entry_duration_s) {
            Ok(w) => w,
            Err(e @ FlowError::NoEntry(_)) => {
                out.warnings.push(e.to_string());
                continue;
            }
            Err(e) => return Err(wrap(e)),
        };
        let seg = segment_clip_with(seq.duration_s(), start, end, &seg_params).map_err(wrap)?;
        let series = clip_motion_series(&seq, &dis).map_err(wrap)?;
        let intensity = condition_intensity(&series, &seg, &seg_params).map_err(|e| match e {
            FlowError::EmptyCondition(_) => PipelineError::Invalid(format!(
                "clip {}: {e} (entry window {start}-{end} s in a {} s clip; check flow.entry_duration_s)",
                seq.clip_id,
                seq.duration_s()
            )),
            e => wrap(e),
        })?;
        if seg.any_short() {
            short += 1;
        }
        out.segments.push(SegmentRecord {
            clip_id: seq.clip_id.clone(),
            room: seq.room,
            week: seq.week,
            entry_start_s: start,
            entry_end_s: end,
            before_short: seg.before.short,
            during_short: seg.during.short,
            after_short: seg.after.short,
            frame_pairs: series.values.len(),
        });
        out.rows.extend(FlowIntensityRow::from_intensity(&series, &intensity));
    }
    if short > 0 {
        out.warnings.push(format!(
            "{short} of {} clips have a condition window shorter than {} s",
            out.segments.len(),
            seg_params.min_window_s
        ));
    }
    Ok(out)
}

/// Everything derived from the per-observation records.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregates {
    pub summaries: Vec<WeeklySummary>,
    pub table: WeeklyFeatureTable,
    pub correlations: CorrelationReport,
    pub contrast: ContrastResult,
    pub panel: TrajectoryPanel,
    pub thermal_excluded: usize,
    pub warnings: Vec<String>,
}

pub struct Observations<'a> {
    pub thermal: &'a [ThermalRecord],
    pub env: &'a [EnvRecord],
    pub acoustic: &'a [AcousticFeatureVector],
    pub flow: &'a [FlowIntensityRow],
}

pub fn weekly_summaries(obs: &Observations<'_>, cfg: &PipelineConfig) -> (Vec<WeeklySummary>, usize, Vec<String>) {
    let thermal = weekly_thermal(obs.thermal);
    let flow = weekly_flow(obs.flow, cfg.flow.first_video_week);
    let mut all = thermal.summaries;
    all.extend(weekly_acoustic(obs.acoustic));
    all.extend(flow.summaries);
    all.extend(weekly_env(obs.env));
    all.sort_by(|a, b| {
        (a.room, a.week, a.modality, a.feature.as_str()).cmp(&(b.room, b.week, b.modality, b.feature.as_str()))
    });
    (all, thermal.excluded, flow.warnings)
}

pub fn aggregate(obs: &Observations<'_>, cfg: &PipelineConfig) -> Result<Aggregates, PipelineError> {
    let (summaries, thermal_excluded, mut warnings) = weekly_summaries(obs, cfg);
    let a = &cfg.analysis;
    let table = build_feature_table(&summaries, obs.env, a.room, a.first_week..=a.last_week)?;
    for w in &table.single_session_weeks {
        warnings.push(format!("week {w}: environment means from a single session"));
    }
    let correlations = correlate_all(&table, cfg.stats.q_threshold)?;
    let weekly = WeekConditionMeans::from_summaries(&summaries, a.room);
    let contrast = early_late_contrast(&weekly, &cfg.stats.contrast())?;
    let panel = trajectory_panel(&table);
    warnings.extend(panel.warnings.iter().cloned());
    Ok(Aggregates {
        summaries,
        table,
        correlations,
        contrast,
        panel,
        thermal_excluded,
        warnings,
    })
}

/// One hypothesis test in `stats.json`.
///
/// `statistic` and `p` are missing when the test could not run; `notes`
/// then carries the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    pub modality: Modality,
    pub feature: String,
    pub method: String,
    pub statistic: Option<f64>,
    pub df: Df<f64>,
    pub p: Option<f64>,
    /// η² for ANOVA, d_z for paired t, mean difference for Tukey-Kramer.
    pub effect: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub groups: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pair: Option<(String, String)>,
    pub notes: Vec<String>,
}

impl TestRecord {
    fn new(modality: Modality, feature: &str, method: &str) -> Self {
        Self {
            modality,
            feature: feature.to_string(),
            method: method.to_string(),
            statistic: None,
            df: Df::None,
            p: None,
            effect: None,
            groups: None,
            pair: None,
            notes: Vec::new(),
        }
    }

    fn groups(mut self, labels: &[String]) -> Self {
        self.groups = Some(labels.to_vec());
        self
    }

    fn pair(mut self, a: &str, b: &str) -> Self {
        self.pair = Some((a.to_string(), b.to_string()));
        self
    }

    fn failed(mut self, e: StatsError) -> Self {
        self.notes.push(format!("not computed: {e}"));
        self
    }

    fn with_test(mut self, r: &TestResult<f64>) -> Self {
        self.statistic = Some(r.statistic);
        self.df = r.df;
        self.p = Some(r.p_value);
        self.effect = r.effect;
        self
    }

    fn with_anova(mut self, a: &AnovaResult<f64>) -> Self {
        self.statistic = Some(a.f_stat);
        self.df = Df::Two(a.df_between as f64, a.df_within as f64);
        self.p = Some(a.p_value);
        self.effect = Some(a.eta_squared);
        self.notes.push(format!("group sizes {:?}", a.group_sizes));
        self
    }
}

/// Which week-effect tests to run on a grouped feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TestSelection {
    pub anova: bool,
    pub tukey: bool,
    pub assumptions: bool,
}

impl TestSelection {
    pub const ALL: TestSelection = TestSelection {
        anova: true,
        tukey: true,
        assumptions: true,
    };
}

fn week_tests(
    modality: Modality,
    feature: &str,
    by_week: &BTreeMap<u32, Vec<f64>>,
    sel: TestSelection,
    cfg: &PipelineConfig,
) -> Vec<TestRecord> {
    let weeks: Vec<u32> = by_week.keys().copied().collect();
    let groups: Vec<&[f64]> = by_week.values().map(Vec::as_slice).collect();
    let labels: Vec<String> = weeks.iter().map(|w| format!("week {w}")).collect();
    let rec = |method: &str| TestRecord::new(modality, feature, method);
    let mut out = Vec::new();
    if sel.anova {
        out.push(match anova_oneway(&groups) {
            Ok(a) => rec("anova").groups(&labels).with_anova(&a),
            Err(e) => rec("anova").groups(&labels).failed(e),
        });
    }
    if sel.tukey {
        match tukey_hsd(&groups, cfg.stats.alpha) {
            Ok(rows) => out.extend(rows.iter().map(|c| {
                let mut r = rec("tukey_kramer").pair(&labels[c.group_a], &labels[c.group_b]);
                r.statistic = Some(c.q_stat);
                r.df = Df::Two(
                    groups.len() as f64,
                    (groups.iter().map(|g| g.len()).sum::<usize>() - groups.len()) as f64,
                );
                r.p = Some(c.p_adjusted);
                r.effect = Some(c.mean_diff);
                r
            })),
            Err(e) => out.push(rec("tukey_kramer").groups(&labels).failed(e)),
        }
    }
    if sel.assumptions {
        let method = match cfg.stats.levene_center {
            LeveneCenter::Mean => "levene",
            LeveneCenter::Median => "brown_forsythe",
        };
        out.push(match levene(&groups, cfg.stats.levene_center) {
            Ok(r) => rec(method).groups(&labels).with_test(&r),
            Err(e) => rec(method).groups(&labels).failed(e),
        });
        out.push(match kruskal_wallis(&groups) {
            Ok(r) => rec("kruskal_wallis").groups(&labels).with_test(&r),
            Err(e) => rec("kruskal_wallis").groups(&labels).failed(e),
        });
        for (label, xs) in labels.iter().zip(&groups) {
            let r = rec("shapiro_wilk").groups(std::slice::from_ref(label));
            out.push(match shapiro_wilk(xs) {
                Ok(t) => r.with_test(&t),
                Err(e) => r.failed(e),
            });
        }
    }
    out
}

/// Week-effect tests on `t_mean_c` per region, for one room; weeks 0 and 1
/// are excluded as in the weekly summaries.
pub fn thermal_tests(records: &[ThermalRecord], sel: TestSelection, cfg: &PipelineConfig) -> Vec<TestRecord> {
    let room = cfg.analysis.room;
    let mut out = Vec::new();
    for region in [Region::Head, Region::Foot] {
        let mut by_week: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
        for r in records
            .iter()
            .filter(|r| r.room == room && r.region == region && r.week > 1)
        {
            by_week.entry(r.week).or_default().push(r.t_mean_c);
        }
        out.extend(week_tests(
            Modality::Thermal,
            thermal_feature(region),
            &by_week,
            sel,
            cfg,
        ));
    }
    out
}

/// Week-effect tests on each of the six clip features, for one room.
pub fn acoustic_tests(features: &[AcousticFeatureVector], sel: TestSelection, cfg: &PipelineConfig) -> Vec<TestRecord> {
    let room = cfg.analysis.room;
    type Getter = fn(&AcousticFeatureVector) -> f64;
    let getters: [(&str, Getter); 6] = [
        ("spectral_centroid", |c| c.centroid_hz),
        ("spectral_bandwidth", |c| c.bandwidth_hz),
        ("spectral_rolloff", |c| c.rolloff_hz),
        ("zcr", |c| c.zcr),
        ("rms", |c| c.rms),
        ("ste", |c| c.ste),
    ];
    let mut out = Vec::new();
    for (name, get) in getters {
        let mut by_week: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
        for c in features.iter().filter(|c| c.room == room) {
            by_week.entry(c.week).or_default().push(get(c));
        }
        out.extend(week_tests(Modality::Acoustic, name, &by_week, sel, cfg));
    }
    out
}

/// Condition effect on weekly mean flow: one-way ANOVA over the three
/// conditions and paired t-tests (weeks as pairs) with d_z.
pub fn flow_tests(summaries: &[WeeklySummary], cfg: &PipelineConfig) -> Vec<TestRecord> {
    let weekly = WeekConditionMeans::from_summaries(summaries, cfg.analysis.room);
    let rec = |method: &str| TestRecord::new(Modality::Flow, "mean_flow_px", method);
    let labels: Vec<String> = Condition::ALL.iter().map(|c| c.to_string()).collect();
    let column = |c: Condition, rows: &[&WeekConditionMeans]| -> Vec<f64> {
        rows.iter()
            .filter_map(|m| match c {
                Condition::Before => Some(m.before),
                Condition::During => Some(m.during),
                Condition::After => m.after,
            })
            .collect()
    };
    let all: Vec<&WeekConditionMeans> = weekly.iter().collect();
    let with_after: Vec<&WeekConditionMeans> = weekly.iter().filter(|m| m.after.is_some()).collect();
    let mut out = Vec::new();
    let groups: Vec<Vec<f64>> = Condition::ALL.iter().map(|&c| column(c, &all)).collect();
    out.push(match anova_oneway(&groups) {
        Ok(a) => rec("anova").groups(&labels).with_anova(&a),
        Err(e) => rec("anova").groups(&labels).failed(e),
    });
    for (a, b) in [
        (Condition::During, Condition::Before),
        (Condition::After, Condition::Before),
        (Condition::During, Condition::After),
    ] {
        let rows = if a == Condition::After || b == Condition::After {
            &with_after
        } else {
            &all
        };
        let r = rec("paired_t").pair(a.as_str(), b.as_str());
        let mut r = match paired_t(&column(a, rows), &column(b, rows)) {
            Ok(t) => r.with_test(&t),
            Err(e) => r.failed(e),
        };
        r.notes.push(format!("{} weeks paired", rows.len()));
        out.push(r);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub room: u32,
    pub alpha: f64,
    pub tests: Vec<TestRecord>,
}

/// One written file and its one-line description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub path: PathBuf,
    pub summary: String,
}

pub fn write_artifact(out_dir: &Path, name: &str, bytes: &[u8], summary: String) -> Result<Artifact, PipelineError> {
    let path = out_dir.join(name);
    write_bytes(&path, bytes)?;
    Ok(Artifact { path, summary })
}

pub fn acoustic_csv(rows: &[AcousticFeatureVector]) -> Vec<u8> {
    csv_bytes(|b| write_acoustic_csv(rows, b))
}

pub fn audio_qc_csv(rows: &[AudioQc]) -> Vec<u8> {
    csv_bytes(|b| {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(b);
        w.write_record(["clip_id", "clipped_fraction", "skipped_frames"])?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    })
}

pub fn flow_csv(rows: &[FlowIntensityRow]) -> Vec<u8> {
    csv_bytes(|b| write_flow_csv(rows, b))
}

pub fn segments_csv(rows: &[SegmentRecord]) -> Vec<u8> {
    csv_bytes(|b| {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(b);
        w.write_record([
            "clip_id",
            "room",
            "week",
            "entry_start_s",
            "entry_end_s",
            "before_short",
            "during_short",
            "after_short",
            "frame_pairs",
        ])?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    })
}

pub fn summaries_csv(rows: &[WeeklySummary]) -> Vec<u8> {
    csv_bytes(|b| write_weekly_summaries(rows, b))
}

pub fn table_csv(table: &WeeklyFeatureTable) -> Vec<u8> {
    csv_bytes(|b| write_feature_table(table, b))
}

pub fn correlations_csv(report: &CorrelationReport) -> Vec<u8> {
    csv_bytes(|b| write_correlations_csv(report, b))
}

/// Run record written next to the results: effective config, counts and warnings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: PipelineConfig,
    pub audio_clips: usize,
    pub flow_clips: usize,
    pub thermal_records: usize,
    pub thermal_excluded: usize,
    pub env_records: usize,
    pub fdr_family_size: usize,
    pub warnings: Vec<String>,
}

/// Reads every input under `data_dir`, runs all stages and writes the
/// results into `out_dir`.
pub fn run_pipeline(data_dir: &Path, out_dir: &Path, cfg: &PipelineConfig) -> Result<Vec<Artifact>, PipelineError> {
    cfg.validate()?;
    let p = &cfg.paths;
    let thermal = load_thermal(&data_dir.join(&p.thermal))?;
    let env = load_env(&data_dir.join(&p.env))?;
    let (events, mut warnings) = load_events(&data_dir.join(&p.events))?;
    let audio = extract_audio(&data_dir.join(&p.audio_clips), cfg)?;
    let manifests = find_manifests(&data_dir.join(&p.video_dir))?;
    let flow = extract_flow(&manifests, &events, cfg)?;
    warnings.extend(flow.warnings.iter().cloned());
    let obs = Observations {
        thermal: &thermal,
        env: &env,
        acoustic: &audio.features,
        flow: &flow.rows,
    };
    let agg = aggregate(&obs, cfg)?;
    warnings.extend(agg.warnings.iter().cloned());
    let mut tests = thermal_tests(&thermal, TestSelection::ALL, cfg);
    tests.extend(acoustic_tests(
        &audio.features,
        TestSelection {
            tukey: false,
            ..TestSelection::ALL
        },
        cfg,
    ));
    tests.extend(flow_tests(&agg.summaries, cfg));
    let tests = StatsReport {
        room: cfg.analysis.room,
        alpha: cfg.stats.alpha,
        tests,
    };

    let mut out = Vec::new();
    let mut put = |name: &str, bytes: Vec<u8>, summary: String| -> Result<(), PipelineError> {
        out.push(write_artifact(out_dir, name, &bytes, summary)?);
        Ok(())
    };
    put(
        "acoustic_features.csv",
        acoustic_csv(&audio.features),
        format!("{} clips", audio.features.len()),
    )?;
    put(
        "acoustic_qc.csv",
        audio_qc_csv(&audio.qc),
        "clipping and silent-frame counts".into(),
    )?;
    put(
        "flow_intensity.csv",
        flow_csv(&flow.rows),
        format!("{} clips x 3 conditions", flow.segments.len()),
    )?;
    put(
        "flow_segments.csv",
        segments_csv(&flow.segments),
        "entry windows used".into(),
    )?;
    put(
        "weekly_summaries.csv",
        summaries_csv(&agg.summaries),
        format!("{} weekly rows", agg.summaries.len()),
    )?;
    put(
        "feature_table.csv",
        table_csv(&agg.table),
        format!(
            "{} weeks x {} features, {} missing cells",
            agg.table.weeks.len(),
            agg.table.columns.len(),
            agg.table.missing_cells()
        ),
    )?;
    let n_sig = agg.correlations.entries.iter().filter(|e| e.significant).count();
    put(
        "correlations.csv",
        correlations_csv(&agg.correlations),
        format!(
            "{} pairs, FDR family {}, {} significant at q < {}",
            agg.correlations.entries.len(),
            agg.correlations.family_size,
            n_sig,
            cfg.stats.q_threshold
        ),
    )?;
    put(
        "contrast.json",
        json_bytes(&agg.contrast),
        format!(
            "early vs late t = {:.3}, p = {:.3e}",
            agg.contrast.test.statistic, agg.contrast.test.p_value
        ),
    )?;
    put(
        "stats.json",
        json_bytes(&tests),
        "week-effect and condition tests".into(),
    )?;
    if cfg.report.enabled {
        for (name, bytes, summary) in report::render_all(&agg, cfg)? {
            put(&name, bytes, summary)?;
        }
    }
    let record = RunRecord {
        config: cfg.clone(),
        audio_clips: audio.features.len(),
        flow_clips: flow.segments.len(),
        thermal_records: thermal.len(),
        thermal_excluded: agg.thermal_excluded,
        env_records: env.len(),
        fdr_family_size: agg.correlations.family_size,
        warnings,
    };
    put(
        "run.json",
        json_bytes(&record),
        format!("{} warnings", record.warnings.len()),
    )?;
    Ok(out)
}
