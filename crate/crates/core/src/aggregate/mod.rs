//! Weekly aggregation, the 10-feature weekly table, cross-modal correlation
//! with FDR control and the early/late habituation contrast.

mod contrast;
mod table;
mod weekly;

use serde::{Deserialize, Serialize};

use crate::stats::StatsError;

pub use contrast::{early_late_contrast, ContrastParams, ContrastResult, WeekConditionMeans};
pub use table::{
    build_feature_table, correlate_all, read_correlations_csv, read_feature_table, trajectory_panel,
    write_correlations_csv, write_feature_table, CorrelationEntry, CorrelationReport, TrajectoryPanel,
    WeeklyFeatureTable, PANELS,
};
pub use weekly::{
    flow_feature, read_weekly_summaries, thermal_feature, weekly_acoustic, weekly_env, weekly_flow, weekly_thermal,
    write_weekly_summaries, FlowWeekly, ThermalWeekly, WeeklySummary,
};

/// Column roster of the weekly feature table.
pub const FEATURE_NAMES: [&str; 10] = [
    "flow_before",
    "flow_during",
    "flow_after",
    "spectral_centroid",
    "zcr",
    "rms",
    "head_temp_mean",
    "foot_temp_mean",
    "ambient_temp",
    "rel_humidity",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Thermal,
    Acoustic,
    Flow,
    Env,
}

impl Modality {
    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Thermal => "thermal",
            Modality::Acoustic => "acoustic",
            Modality::Flow => "flow",
            Modality::Env => "env",
        }
    }
}

impl std::fmt::Display for Modality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Modality of a weekly feature name, including the non-table acoustic ones.
pub fn modality_of(feature: &str) -> Option<Modality> {
    Some(match feature {
        "flow_before" | "flow_during" | "flow_after" => Modality::Flow,
        "spectral_centroid" | "spectral_bandwidth" | "spectral_rolloff" | "zcr" | "rms" | "ste" => Modality::Acoustic,
        "head_temp_mean" | "foot_temp_mean" => Modality::Thermal,
        "ambient_temp" | "rel_humidity" => Modality::Env,
        _ => return None,
    })
}

#[derive(Debug, thiserror::Error)]
pub enum AggregateError {
    #[error("only {populated} populated weeks; need at least 3")]
    TooFewWeeks { populated: usize },
    #[error("insufficient weeks in {phase} phase: {found} usable, need 3")]
    InsufficientWeeks { phase: &'static str, found: usize },
    #[error("unknown feature column '{0}'")]
    UnknownColumn(String),
    #[error("malformed feature table: {0}")]
    Table(String),
    #[error(transparent)]
    Stats(#[from] StatsError),
}
