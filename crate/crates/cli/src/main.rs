use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aviary_sense::aggregate::{
    correlate_all, early_late_contrast, read_correlations_csv, read_feature_table, read_weekly_summaries, weekly_env,
    weekly_thermal, WeekConditionMeans,
};
use aviary_sense::config::PipelineConfig;
use aviary_sense::flow::read_flow_csv;
use aviary_sense::pipeline::{self as pl, Artifact, Observations, PipelineError, StatsReport, TestSelection};
use aviary_sense::report::{render_figures, ReportInputs};
use aviary_sense::stats::LeveneCenter;
use aviary_sense::synth::{generate_dataset, SynthConfig, SynthError};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Multimodal laying-hen sensing analytics.
///
/// Settings resolve as command-line flags, then the JSON config, then
/// built-in defaults. Set AVIARY_SENSE_THREADS to cap worker threads.
#[derive(Debug, Parser)]
#[command(name = "aviary-sense", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded synthetic dataset with planted trends.
    Synth(SynthArgs),
    /// Extract per-observation features for one modality.
    Features {
        #[command(subcommand)]
        kind: FeatureCommand,
    },
    /// Motion intensity before, during and after caretaker entries.
    Flow(FlowArgs),
    /// Weekly summaries, feature table, correlations and contrast.
    Aggregate(AggregateArgs),
    /// Individual statistical analyses.
    Stats {
        #[command(subcommand)]
        kind: StatsCommand,
    },
    /// Figures and their backing CSVs from aggregate outputs.
    Report(ReportArgs),
    /// Every stage end to end on a data directory.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args, Clone, Default)]
struct Common {
    /// JSON pipeline config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Analysis room.
    #[arg(long, global = true)]
    room: Option<u32>,
    /// Significance level for individual tests.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// FDR threshold for the correlation family.
    #[arg(long, global = true)]
    q: Option<f64>,
    #[arg(long, global = true, value_enum)]
    levene_center: Option<CenterArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CenterArg {
    Mean,
    Median,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON generator config; unknown keys are rejected.
    #[arg(long = "synth-config")]
    synth_config: Option<PathBuf>,
    /// Use 420/90/420 s video segments instead of the short default.
    #[arg(long)]
    full_geometry: bool,
}

#[derive(Debug, Subcommand)]
enum FeatureCommand {
    /// Six acoustic descriptors per clip.
    Audio {
        #[arg(long)]
        clips: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Spectral gate strength; 0 disables gating.
        #[arg(long)]
        gate_strength: Option<f64>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        hop: Option<usize>,
        #[arg(long)]
        target_rms: Option<f64>,
    },
    /// Weekly head and foot temperature summaries.
    Thermal {
        #[arg(long)]
        thermal: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Weekly ambient temperature and humidity summaries.
    Env {
        #[arg(long)]
        env: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct FlowArgs {
    /// A clip manifest.json, or a directory of clip subdirectories.
    #[arg(long)]
    frames: PathBuf,
    #[arg(long)]
    events: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Also write the entry windows used.
    #[arg(long)]
    segments: Option<PathBuf>,
    /// Entry length in seconds.
    #[arg(long)]
    entry_duration: Option<f64>,
}

#[derive(Debug, Args)]
struct AggregateArgs {
    #[arg(long)]
    thermal: PathBuf,
    #[arg(long)]
    env: PathBuf,
    #[arg(long)]
    acoustic: PathBuf,
    #[arg(long)]
    flow: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum StatsCommand {
    /// Week-effect ANOVA with Tukey-Kramer (thermal) and ANOVA (acoustic).
    Anova {
        #[arg(long)]
        thermal: Option<PathBuf>,
        #[arg(long)]
        acoustic: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Levene, Kruskal-Wallis and Shapiro-Wilk on acoustic features, and
    /// condition tests on weekly flow.
    Tests {
        #[arg(long)]
        acoustic: Option<PathBuf>,
        /// weekly_summaries.csv, for the flow condition tests.
        #[arg(long)]
        summaries: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pearson r for every feature pair with Benjamini-Hochberg FDR.
    Correlate {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value = "correlations.csv")]
        out: PathBuf,
    },
    /// Early vs late during-minus-before flow contrast.
    Contrast {
        #[arg(long)]
        summaries: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Directory with feature_table.csv, weekly_summaries.csv and correlations.csv.
    #[arg(long)]
    results: PathBuf,
    /// Defaults to the results directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Synth(#[from] SynthError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        let io = match self {
            CliError::Pipeline(e) => e.is_io(),
            CliError::Synth(e) => matches!(e, SynthError::Io { .. }),
        };
        if io {
            2
        } else {
            1
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Config file (explicit, else `fallback` when it exists), then flag overrides.
fn resolve_config(common: &Common, fallback: Option<&Path>) -> Result<PipelineConfig> {
    let mut cfg = match (&common.config, fallback) {
        (Some(p), _) => PipelineConfig::load(p).map_err(PipelineError::from)?,
        (None, Some(p)) if p.is_file() => {
            log::info!("using config {}", p.display());
            PipelineConfig::load(p).map_err(PipelineError::from)?
        }
        _ => PipelineConfig::default(),
    };
    if let Some(r) = common.room {
        cfg.analysis.room = r;
    }
    if let Some(a) = common.alpha {
        cfg.stats.alpha = a;
    }
    if let Some(q) = common.q {
        cfg.stats.q_threshold = q;
    }
    if let Some(c) = common.levene_center {
        cfg.stats.levene_center = match c {
            CenterArg::Mean => LeveneCenter::Mean,
            CenterArg::Median => LeveneCenter::Median,
        };
    }
    Ok(cfg)
}

fn validated(cfg: PipelineConfig) -> Result<PipelineConfig> {
    cfg.validate().map_err(PipelineError::from)?;
    Ok(cfg)
}

fn write(path: &Path, bytes: &[u8], summary: String) -> Result<Artifact> {
    pl::write_bytes(path, bytes)?;
    Ok(Artifact {
        path: path.to_path_buf(),
        summary,
    })
}

fn read_csv_file<T>(path: &Path, parse: impl FnOnce(&[u8]) -> std::result::Result<T, String>) -> Result<T> {
    let bytes = std::fs::read(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse(&bytes).map_err(|e| PipelineError::Invalid(format!("{}: {e}", path.display())).into())
}

fn stats_json(cfg: &PipelineConfig, tests: Vec<pl::TestRecord>) -> Vec<u8> {
    pl::json_bytes(&StatsReport {
        room: cfg.analysis.room,
        alpha: cfg.stats.alpha,
        tests,
    })
}

fn run(common: &Common, command: Command) -> Result<Vec<Artifact>> {
    match command {
        Command::Synth(a) => {
            let mut cfg = match &a.synth_config {
                Some(p) => {
                    let text = pl::read_text(p)?;
                    serde_json::from_str::<SynthConfig>(&text)
                        .map_err(|e| PipelineError::Invalid(format!("{}: {e}", p.display())))?
                }
                None => SynthConfig::default(),
            };
            if let Some(s) = a.seed {
                cfg.seed = s;
            }
            if a.full_geometry {
                cfg.video.full_geometry = true;
            }
            let truth = generate_dataset(&cfg, &a.out)?;
            Ok(vec![Artifact {
                path: a.out.clone(),
                summary: format!(
                    "seed {}, weeks {}-{}, {} planted couplings",
                    truth.seed,
                    cfg.first_week,
                    cfg.last_week,
                    truth.couplings.len()
                ),
            }])
        }
        Command::Features { kind } => features(common, kind),
        Command::Flow(a) => {
            let mut cfg = resolve_config(common, None)?;
            if let Some(d) = a.entry_duration {
                cfg.flow.entry_duration_s = d;
            }
            let cfg = validated(cfg)?;
            let manifests = if a.frames.is_dir() {
                pl::find_manifests(&a.frames)?
            } else {
                vec![a.frames.clone()]
            };
            let (events, _) = pl::load_events(&a.events)?;
            let flow = pl::extract_flow(&manifests, &events, &cfg)?;
            for w in &flow.warnings {
                log::warn!("{w}");
            }
            let mut out = vec![write(
                &a.out,
                &pl::flow_csv(&flow.rows),
                format!("{} clips x 3 conditions", flow.segments.len()),
            )?];
            if let Some(p) = &a.segments {
                out.push(write(
                    p,
                    &pl::segments_csv(&flow.segments),
                    "entry windows used".into(),
                )?);
            }
            Ok(out)
        }
        Command::Aggregate(a) => {
            let cfg = validated(resolve_config(common, None)?)?;
            let thermal = pl::load_thermal(&a.thermal)?;
            let env = pl::load_env(&a.env)?;
            let acoustic = read_csv_file(&a.acoustic, |b| {
                aviary_sense::acoustic::read_acoustic_csv(b).map_err(|e| e.to_string())
            })?;
            let flow = read_csv_file(&a.flow, |b| read_flow_csv(b).map_err(|e| e.to_string()))?;
            let obs = Observations {
                thermal: &thermal,
                env: &env,
                acoustic: &acoustic,
                flow: &flow,
            };
            let agg = pl::aggregate(&obs, &cfg)?;
            for w in &agg.warnings {
                log::warn!("{w}");
            }
            Ok(vec![
                write(
                    &a.out.join("weekly_summaries.csv"),
                    &pl::summaries_csv(&agg.summaries),
                    format!("{} weekly rows", agg.summaries.len()),
                )?,
                write(
                    &a.out.join("feature_table.csv"),
                    &pl::table_csv(&agg.table),
                    format!("{} weeks x {} features", agg.table.weeks.len(), agg.table.columns.len()),
                )?,
                write(
                    &a.out.join("correlations.csv"),
                    &pl::correlations_csv(&agg.correlations),
                    format!(
                        "{} pairs, FDR family {}",
                        agg.correlations.entries.len(),
                        agg.correlations.family_size
                    ),
                )?,
                write(
                    &a.out.join("contrast.json"),
                    &pl::json_bytes(&agg.contrast),
                    format!(
                        "t = {:.3}, p = {:.3e}",
                        agg.contrast.test.statistic, agg.contrast.test.p_value
                    ),
                )?,
            ])
        }
        Command::Stats { kind } => stats(common, kind),
        Command::Report(a) => {
            let cfg = validated(resolve_config(common, None)?)?;
            let table = read_csv_file(&a.results.join("feature_table.csv"), |b| {
                read_feature_table(b).map_err(|e| e.to_string())
            })?;
            let summaries = read_csv_file(&a.results.join("weekly_summaries.csv"), |b| {
                read_weekly_summaries(b).map_err(|e| e.to_string())
            })?;
            let correlations = read_csv_file(&a.results.join("correlations.csv"), |b| {
                read_correlations_csv(b, cfg.stats.q_threshold).map_err(|e| e.to_string())
            })?;
            let inp = ReportInputs {
                room: cfg.analysis.room,
                table: &table,
                summaries: &summaries,
                correlations: &correlations,
            };
            let out_dir = a.out.unwrap_or(a.results);
            render_figures(&inp, cfg.report.width, cfg.report.height)?
                .into_iter()
                .map(|(name, bytes, summary)| write(&out_dir.join(name), &bytes, summary))
                .collect()
        }
        Command::Pipeline(a) => {
            let cfg = resolve_config(common, Some(&a.input.join("pipeline.json")))?;
            Ok(pl::run_pipeline(&a.input, &a.out, &cfg)?)
        }
    }
}

fn features(common: &Common, kind: FeatureCommand) -> Result<Vec<Artifact>> {
    match kind {
        FeatureCommand::Audio {
            clips,
            out,
            gate_strength,
            window,
            hop,
            target_rms,
        } => {
            let mut cfg = resolve_config(common, None)?;
            let ac = &mut cfg.acoustic;
            if let Some(g) = gate_strength {
                ac.gate_strength = g;
            }
            if let Some(w) = window {
                ac.window_len = w;
            }
            if let Some(h) = hop {
                ac.hop_len = h;
            }
            if let Some(r) = target_rms {
                ac.target_rms = r;
            }
            let cfg = validated(cfg)?;
            let audio = pl::extract_audio(&clips, &cfg)?;
            let clipped = audio.qc.iter().filter(|q| q.clipped_fraction > 0.0).count();
            Ok(vec![write(
                &out,
                &pl::acoustic_csv(&audio.features),
                format!(
                    "{} clips, {clipped} with clipping after normalization",
                    audio.features.len()
                ),
            )?])
        }
        FeatureCommand::Thermal { thermal, out } => {
            let w = weekly_thermal(&pl::load_thermal(&thermal)?);
            Ok(vec![write(
                &out,
                &pl::summaries_csv(&w.summaries),
                format!(
                    "{} weekly rows, {} records before week 2 excluded",
                    w.summaries.len(),
                    w.excluded
                ),
            )?])
        }
        FeatureCommand::Env { env, out } => {
            let w = weekly_env(&pl::load_env(&env)?);
            Ok(vec![write(
                &out,
                &pl::summaries_csv(&w),
                format!("{} weekly rows", w.len()),
            )?])
        }
    }
}

fn stats(common: &Common, kind: StatsCommand) -> Result<Vec<Artifact>> {
    let cfg = validated(resolve_config(common, None)?)?;
    let read_acoustic = |p: &Path| {
        read_csv_file(p, |b| {
            aviary_sense::acoustic::read_acoustic_csv(b).map_err(|e| e.to_string())
        })
    };
    let read_summaries = |p: &Path| read_csv_file(p, |b| read_weekly_summaries(b).map_err(|e| e.to_string()));
    match kind {
        StatsCommand::Anova { thermal, acoustic, out } => {
            let sel = TestSelection {
                anova: true,
                tukey: true,
                assumptions: false,
            };
            let mut tests = Vec::new();
            if let Some(p) = &thermal {
                tests.extend(pl::thermal_tests(&pl::load_thermal(p)?, sel, &cfg));
            }
            if let Some(p) = &acoustic {
                let sel = TestSelection { tukey: false, ..sel };
                tests.extend(pl::acoustic_tests(&read_acoustic(p)?, sel, &cfg));
            }
            if tests.is_empty() {
                return Err(PipelineError::Invalid("stats anova needs --thermal and/or --acoustic".into()).into());
            }
            let n = tests.len();
            Ok(vec![write(&out, &stats_json(&cfg, tests), format!("{n} tests"))?])
        }
        StatsCommand::Tests {
            acoustic,
            summaries,
            out,
        } => {
            let mut tests = Vec::new();
            if let Some(p) = &acoustic {
                let sel = TestSelection {
                    anova: false,
                    tukey: false,
                    assumptions: true,
                };
                tests.extend(pl::acoustic_tests(&read_acoustic(p)?, sel, &cfg));
            }
            if let Some(p) = &summaries {
                tests.extend(pl::flow_tests(&read_summaries(p)?, &cfg));
            }
            if tests.is_empty() {
                return Err(PipelineError::Invalid("stats tests needs --acoustic and/or --summaries".into()).into());
            }
            let n = tests.len();
            Ok(vec![write(&out, &stats_json(&cfg, tests), format!("{n} tests"))?])
        }
        StatsCommand::Correlate { table, out } => {
            let table = read_csv_file(&table, |b| read_feature_table(b).map_err(|e| e.to_string()))?;
            let report = correlate_all(&table, cfg.stats.q_threshold).map_err(PipelineError::from)?;
            let n_sig = report.entries.iter().filter(|e| e.significant).count();
            Ok(vec![write(
                &out,
                &pl::correlations_csv(&report),
                format!(
                    "{} pairs, FDR family {}, {n_sig} significant at q < {}",
                    report.entries.len(),
                    report.family_size,
                    cfg.stats.q_threshold
                ),
            )?])
        }
        StatsCommand::Contrast { summaries, out } => {
            let rows = read_summaries(&summaries)?;
            let weekly = WeekConditionMeans::from_summaries(&rows, cfg.analysis.room);
            let c = early_late_contrast(&weekly, &cfg.stats.contrast()).map_err(PipelineError::from)?;
            Ok(vec![write(
                &out,
                &pl::json_bytes(&c),
                format!("t = {:.3}, p = {:.3e}", c.test.statistic, c.test.p_value),
            )?])
        }
    }
}

fn init_threads() -> std::result::Result<(), String> {
    let Ok(raw) = std::env::var("AVIARY_SENSE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("AVIARY_SENSE_THREADS must be a positive integer, got '{raw}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match run(&cli.common, cli.command) {
        Ok(artifacts) => {
            for a in artifacts {
                println!("{}: {}", a.path.display(), a.summary);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
