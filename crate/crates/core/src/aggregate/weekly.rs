use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::Modality;
use crate::acoustic::AcousticFeatureVector;
use crate::flow::{Condition, FlowIntensityRow};
use crate::ingest::{EnvRecord, Region, Session, ThermalRecord};

/// Mean, sample sd and count of one feature for one room and week.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeeklySummary {
    pub room: u32,
    pub week: u32,
    pub modality: Modality,
    pub feature: String,
    pub mean: f64,
    /// Missing when fewer than two observations.
    pub sd: Option<f64>,
    pub n: usize,
}

impl WeeklySummary {
    fn from_values(room: u32, week: u32, modality: Modality, feature: &str, xs: &[f64]) -> Self {
        let n = xs.len();
        // identical observations give their exact value and sd 0 without rounding drift
        let mean = if xs.iter().all(|&x| x == xs[0]) {
            xs[0]
        } else {
            xs.iter().sum::<f64>() / n as f64
        };
        let sd = (n >= 2).then(|| (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt());
        Self {
            room,
            week,
            modality,
            feature: feature.to_string(),
            mean,
            sd,
            n,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalWeekly {
    pub summaries: Vec<WeeklySummary>,
    /// Records dropped because legs are not reliably visible before week 2.
    pub excluded: usize,
}

pub fn thermal_feature(region: Region) -> &'static str {
    match region {
        Region::Head => "head_temp_mean",
        Region::Foot => "foot_temp_mean",
    }
}

/// Per room, week and region statistics of `t_mean_c`; weeks 0 and 1 are excluded.
pub fn weekly_thermal(records: &[ThermalRecord]) -> ThermalWeekly {
    let mut groups: BTreeMap<(u32, u32, Region), Vec<f64>> = BTreeMap::new();
    let mut excluded = 0;
    for r in records {
        if r.week <= 1 {
            excluded += 1;
            continue;
        }
        groups.entry((r.room, r.week, r.region)).or_default().push(r.t_mean_c);
    }
    ThermalWeekly {
        summaries: groups
            .iter()
            .map(|(&(room, week, region), xs)| {
                WeeklySummary::from_values(room, week, Modality::Thermal, thermal_feature(region), xs)
            })
            .collect(),
        excluded,
    }
}

pub const ACOUSTIC_FEATURES: [&str; 6] = [
    "spectral_centroid",
    "spectral_bandwidth",
    "spectral_rolloff",
    "zcr",
    "rms",
    "ste",
];

/// Per room and week statistics of the six clip descriptors. Weeks without clips are absent.
pub fn weekly_acoustic(features: &[AcousticFeatureVector]) -> Vec<WeeklySummary> {
    let mut groups: BTreeMap<(u32, u32), Vec<&AcousticFeatureVector>> = BTreeMap::new();
    for f in features {
        groups.entry((f.room, f.week)).or_default().push(f);
    }
    let mut out = Vec::new();
    for (&(room, week), clips) in &groups {
        let cols: [Vec<f64>; 6] = [
            clips.iter().map(|c| c.centroid_hz).collect(),
            clips.iter().map(|c| c.bandwidth_hz).collect(),
            clips.iter().map(|c| c.rolloff_hz).collect(),
            clips.iter().map(|c| c.zcr).collect(),
            clips.iter().map(|c| c.rms).collect(),
            clips.iter().map(|c| c.ste).collect(),
        ];
        for (name, xs) in ACOUSTIC_FEATURES.iter().zip(cols.iter()) {
            out.push(WeeklySummary::from_values(room, week, Modality::Acoustic, name, xs));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowWeekly {
    pub summaries: Vec<WeeklySummary>,
    pub rejected: usize,
    pub warnings: Vec<String>,
}

pub fn flow_feature(c: Condition) -> &'static str {
    match c {
        Condition::Before => "flow_before",
        Condition::During => "flow_during",
        Condition::After => "flow_after",
    }
}

/// Per room, week and entry condition statistics over clips. Rows from
/// weeks before `first_video_week` are rejected with a warning.
pub fn weekly_flow(rows: &[FlowIntensityRow], first_video_week: u32) -> FlowWeekly {
    let mut groups: BTreeMap<(u32, u32, Condition), Vec<f64>> = BTreeMap::new();
    let mut rejected = 0;
    let mut warnings = Vec::new();
    for r in rows {
        if r.week < first_video_week {
            rejected += 1;
            warnings.push(format!(
                "clip {} week {}: video unavailable weeks 1–{}",
                r.clip_id,
                r.week,
                first_video_week.saturating_sub(1)
            ));
            continue;
        }
        groups
            .entry((r.room, r.week, r.condition))
            .or_default()
            .push(r.mean_flow_px);
    }
    FlowWeekly {
        summaries: groups
            .iter()
            .map(|(&(room, week, c), xs)| WeeklySummary::from_values(room, week, Modality::Flow, flow_feature(c), xs))
            .collect(),
        rejected,
        warnings,
    }
}

/// Per room and week environment statistics over all readings, plus AM-only
/// and PM-only rows suffixed `_am` / `_pm`.
pub fn weekly_env(records: &[EnvRecord]) -> Vec<WeeklySummary> {
    let mut groups: BTreeMap<(u32, u32), Vec<&EnvRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.room, r.week)).or_default().push(r);
    }
    let mut out = Vec::new();
    for (&(room, week), rs) in &groups {
        let subsets: [(&str, Option<Session>); 3] =
            [("", None), ("_am", Some(Session::AM)), ("_pm", Some(Session::PM))];
        for (suffix, session) in subsets {
            let sel: Vec<&&EnvRecord> = rs.iter().filter(|r| session.is_none_or(|s| r.session == s)).collect();
            if sel.is_empty() {
                continue;
            }
            let temps: Vec<f64> = sel.iter().map(|r| r.temp_c).collect();
            let rh: Vec<f64> = sel.iter().map(|r| r.rh_pct).collect();
            out.push(WeeklySummary::from_values(
                room,
                week,
                Modality::Env,
                &format!("ambient_temp{suffix}"),
                &temps,
            ));
            out.push(WeeklySummary::from_values(
                room,
                week,
                Modality::Env,
                &format!("rel_humidity{suffix}"),
                &rh,
            ));
        }
    }
    out
}

pub fn write_weekly_summaries<W: Write>(rows: &[WeeklySummary], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["room", "week", "modality", "feature", "mean", "sd", "n"])?;
    for r in rows {
        w.write_record([
            r.room.to_string(),
            r.week.to_string(),
            r.modality.to_string(),
            r.feature.clone(),
            r.mean.to_string(),
            r.sd.map(|s| s.to_string()).unwrap_or_default(),
            r.n.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_weekly_summaries<R: std::io::Read>(input: R) -> csv::Result<Vec<WeeklySummary>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input)
        .deserialize()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn thermal(week: u32, region: Region, t: f64) -> ThermalRecord {
        ThermalRecord {
            room: 1,
            week,
            capture_date: NaiveDate::from_ymd_opt(2024, 1, 1).unwrap(),
            region,
            t_min_c: t - 1.0,
            t_max_c: t + 1.0,
            t_mean_c: t,
        }
    }

    #[test]
    fn thermal_examples() {
        let r = weekly_thermal(&[
            thermal(5, Region::Foot, 30.0),
            thermal(5, Region::Foot, 32.0),
            thermal(5, Region::Foot, 34.0),
        ]);
        assert_eq!(r.summaries.len(), 1);
        let s = &r.summaries[0];
        assert_eq!(
            (s.mean, s.sd, s.n, s.feature.as_str()),
            (32.0, Some(2.0), 3, "foot_temp_mean")
        );
        let r = weekly_thermal(&[thermal(0, Region::Head, 30.0), thermal(1, Region::Head, 31.0)]);
        assert!(r.summaries.is_empty());
        assert_eq!(r.excluded, 2);
        let r = weekly_thermal(&[thermal(6, Region::Head, 30.5)]);
        assert_eq!(
            (r.summaries[0].mean, r.summaries[0].sd, r.summaries[0].n),
            (30.5, None, 1)
        );
    }

    fn clip(week: u32, centroid: f64) -> AcousticFeatureVector {
        AcousticFeatureVector {
            clip_id: format!("c{centroid}"),
            room: 1,
            week,
            day: None,
            centroid_hz: centroid,
            bandwidth_hz: 200.0,
            rolloff_hz: 3000.0,
            zcr: 0.1,
            rms: 0.1,
            ste: 8.8,
        }
    }

    #[test]
    fn acoustic_examples() {
        let rows = weekly_acoustic(&vec![clip(5, 1000.0); 12]);
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(|r| r.sd == Some(0.0) && r.n == 12));
        let rows = weekly_acoustic(&[clip(6, 1000.0), clip(6, 1100.0)]);
        let c = rows.iter().find(|r| r.feature == "spectral_centroid").unwrap();
        assert_eq!(c.mean, 1050.0);
        assert!((c.sd.unwrap() - 70.71067811865476).abs() < 1e-9);
        assert!(weekly_acoustic(&[clip(6, 1.0)]).iter().all(|r| r.week == 6));
    }

    fn flow_rows(week: u32, id: &str, v: [f64; 3]) -> Vec<FlowIntensityRow> {
        Condition::ALL
            .iter()
            .zip(v)
            .map(|(&condition, mean_flow_px)| FlowIntensityRow {
                clip_id: id.into(),
                room: 1,
                week,
                day: None,
                condition,
                mean_flow_px,
            })
            .collect()
    }

    #[test]
    fn flow_examples() {
        let mut rows = Vec::new();
        for id in ["a", "b", "c"] {
            rows.extend(flow_rows(8, id, [1.0, 5.0, 1.0]));
        }
        rows.extend(flow_rows(3, "early", [1.0, 2.0, 1.0]));
        rows.extend(flow_rows(9, "single", [1.0, 2.0, 3.0]));
        let r = weekly_flow(&rows, 5);
        assert_eq!(r.rejected, 3);
        assert!(r.warnings[0].contains("video unavailable weeks 1–4"));
        let w8: Vec<_> = r.summaries.iter().filter(|s| s.week == 8).collect();
        assert_eq!(
            w8.iter().map(|s| (s.feature.as_str(), s.mean, s.n)).collect::<Vec<_>>(),
            vec![("flow_before", 1.0, 3), ("flow_during", 5.0, 3), ("flow_after", 1.0, 3)]
        );
        assert!(r.summaries.iter().filter(|s| s.week == 9).all(|s| s.sd.is_none()));
    }

    #[test]
    fn aggregation_is_linear() {
        let a = [1.0, 2.5, 7.0];
        let b = [3.0, -1.0];
        let all: Vec<f64> = a.iter().chain(&b).copied().collect();
        let sa = WeeklySummary::from_values(1, 5, Modality::Env, "x", &a);
        let sb = WeeklySummary::from_values(1, 5, Modality::Env, "x", &b);
        let s = WeeklySummary::from_values(1, 5, Modality::Env, "x", &all);
        let weighted = (sa.mean * 3.0 + sb.mean * 2.0) / 5.0;
        assert!((s.mean - weighted).abs() < 1e-12);
    }
}
