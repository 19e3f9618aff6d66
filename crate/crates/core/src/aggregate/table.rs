use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::{AggregateError, WeeklySummary, FEATURE_NAMES};
use crate::ingest::{EnvRecord, Session};
use crate::stats::{bh_fdr, pearson, zscore, StatsError};

/// Weeks x features matrix with missing cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeeklyFeatureTable {
    pub weeks: Vec<u32>,
    pub columns: Vec<String>,
    /// Row-major: `values[row][col]`.
    pub values: Vec<Vec<Option<f64>>>,
    /// Weeks whose environment means come from a single session.
    pub single_session_weeks: Vec<u32>,
}

impl WeeklyFeatureTable {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let j = self.column_index(name)?;
        Some(self.values.iter().map(|row| row[j]).collect())
    }

    pub fn missing_cells(&self) -> usize {
        self.values.iter().flatten().filter(|v| v.is_none()).count()
    }

    pub fn populated_weeks(&self) -> usize {
        self.values.iter().filter(|row| row.iter().any(Option::is_some)).count()
    }

    /// Same data with columns in the given order.
    pub fn with_column_order(&self, order: &[&str]) -> Result<Self, AggregateError> {
        let idx: Vec<usize> = order
            .iter()
            .map(|n| {
                self.column_index(n)
                    .ok_or_else(|| AggregateError::UnknownColumn(n.to_string()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            weeks: self.weeks.clone(),
            columns: order.iter().map(|s| s.to_string()).collect(),
            values: self
                .values
                .iter()
                .map(|row| idx.iter().map(|&j| row[j]).collect())
                .collect(),
            single_session_weeks: self.single_session_weeks.clone(),
        })
    }
}

/// Assembles the 10-column table for one room over `weeks`.
///
/// Flow, acoustic and thermal cells take the weekly means from `summaries`;
/// environment cells average every reading of the week.
pub fn build_feature_table(
    summaries: &[WeeklySummary],
    env: &[EnvRecord],
    room: u32,
    weeks: RangeInclusive<u32>,
) -> Result<WeeklyFeatureTable, AggregateError> {
    let weeks: Vec<u32> = weeks.collect();
    let mut lookup: BTreeMap<(&str, u32), f64> = BTreeMap::new();
    for s in summaries.iter().filter(|s| s.room == room) {
        lookup.insert((s.feature.as_str(), s.week), s.mean);
    }
    let mut env_by_week: BTreeMap<u32, Vec<&EnvRecord>> = BTreeMap::new();
    for r in env.iter().filter(|r| r.room == room) {
        env_by_week.entry(r.week).or_default().push(r);
    }
    let mut single_session_weeks = Vec::new();
    let mut values = Vec::with_capacity(weeks.len());
    for &w in &weeks {
        let mut row: Vec<Option<f64>> = FEATURE_NAMES[..8]
            .iter()
            .map(|f| lookup.get(&(*f, w)).copied())
            .collect();
        match env_by_week.get(&w) {
            Some(rs) => {
                let n = rs.len() as f64;
                row.push(Some(rs.iter().map(|r| r.temp_c).sum::<f64>() / n));
                row.push(Some(rs.iter().map(|r| r.rh_pct).sum::<f64>() / n));
                let am = rs.iter().any(|r| r.session == Session::AM);
                let pm = rs.iter().any(|r| r.session == Session::PM);
                if !(am && pm) {
                    single_session_weeks.push(w);
                }
            }
            None => row.extend([None, None]),
        }
        values.push(row);
    }
    let table = WeeklyFeatureTable {
        weeks,
        columns: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        values,
        single_session_weeks,
    };
    let populated = table.populated_weeks();
    if populated < 3 {
        return Err(AggregateError::TooFewWeeks { populated });
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEntry {
    pub feature_a: String,
    pub feature_b: String,
    pub r: Option<f64>,
    pub p_raw: Option<f64>,
    pub q: Option<f64>,
    pub significant: bool,
    /// Rows where both cells are present.
    pub n_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub entries: Vec<CorrelationEntry>,
    /// Number of entries with a defined r, all adjusted jointly.
    pub family_size: usize,
    pub q_threshold: f64,
}

impl CorrelationReport {
    /// Entry for an unordered pair.
    pub fn get(&self, a: &str, b: &str) -> Option<&CorrelationEntry> {
        self.entries
            .iter()
            .find(|e| (e.feature_a == a && e.feature_b == b) || (e.feature_a == b && e.feature_b == a))
    }
}

/// Pearson r for every column pair with pairwise-complete deletion, then
/// Benjamini-Hochberg across all pairs with a defined r.
///
/// Pairs with fewer than 3 complete rows or a constant side get no r and
/// stay out of the FDR family.
pub fn correlate_all(table: &WeeklyFeatureTable, q_threshold: f64) -> Result<CorrelationReport, AggregateError> {
    let k = table.columns.len();
    let mut entries = Vec::with_capacity(k * (k - 1) / 2);
    for a in 0..k {
        for b in a + 1..k {
            let (xs, ys): (Vec<f64>, Vec<f64>) = table.values.iter().filter_map(|row| Some((row[a]?, row[b]?))).unzip();
            let n_pairs = xs.len();
            let (r, p) = if n_pairs < 3 {
                (None, None)
            } else {
                match pearson(&xs, &ys) {
                    Ok(t) => (t.effect, Some(t.p_value)),
                    Err(StatsError::ZeroVariance) => (None, None),
                    Err(e) => return Err(e.into()),
                }
            };
            entries.push(CorrelationEntry {
                feature_a: table.columns[a].clone(),
                feature_b: table.columns[b].clone(),
                r,
                p_raw: p,
                q: None,
                significant: false,
                n_pairs,
            });
        }
    }
    let family: Vec<(usize, f64)> = entries
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.p_raw.map(|p| (i, p)))
        .collect();
    let labelled: Vec<(String, f64)> = family.iter().map(|&(i, p)| (i.to_string(), p)).collect();
    let adjusted = bh_fdr(&labelled, q_threshold)?;
    for (&(i, _), fdr) in family.iter().zip(&adjusted) {
        entries[i].q = Some(fdr.q_value);
        entries[i].significant = fdr.significant;
    }
    Ok(CorrelationReport {
        entries,
        family_size: family.len(),
        q_threshold,
    })
}

/// Figure-style panel groupings of z-scored features.
pub const PANELS: [(&str, &[&str]); 3] = [
    ("A", &["head_temp_mean", "spectral_centroid", "flow_before"]),
    ("B", &["foot_temp_mean", "rms"]),
    (
        "C",
        &[
            "head_temp_mean",
            "spectral_centroid",
            "flow_before",
            "foot_temp_mean",
            "rms",
            "ambient_temp",
        ],
    ),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPanel {
    pub weeks: Vec<u32>,
    /// z-scored columns, in table order; constant columns are dropped.
    pub series: Vec<(String, Vec<Option<f64>>)>,
    pub panels: Vec<(String, Vec<String>)>,
    pub warnings: Vec<String>,
}

impl TrajectoryPanel {
    pub fn series(&self, name: &str) -> Option<&[Option<f64>]> {
        self.series.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }
}

/// z-scores every column over its present weeks and groups them into panels.
pub fn trajectory_panel(table: &WeeklyFeatureTable) -> TrajectoryPanel {
    let mut series = Vec::new();
    let mut warnings = Vec::new();
    for (j, name) in table.columns.iter().enumerate() {
        let present: Vec<(usize, f64)> = table
            .values
            .iter()
            .enumerate()
            .filter_map(|(i, row)| Some((i, row[j]?)))
            .collect();
        let xs: Vec<f64> = present.iter().map(|&(_, v)| v).collect();
        match zscore(&xs) {
            Ok(z) => {
                let mut col = vec![None; table.weeks.len()];
                for (&(i, _), zv) in present.iter().zip(z) {
                    col[i] = Some(zv);
                }
                series.push((name.clone(), col));
            }
            Err(e) => warnings.push(format!("{name} dropped from panels: {e}")),
        }
    }
    let panels = PANELS
        .iter()
        .map(|(p, members)| {
            let kept = members
                .iter()
                .filter(|m| series.iter().any(|(s, _)| s == *m))
                .map(|s| s.to_string())
                .collect();
            (p.to_string(), kept)
        })
        .collect();
    TrajectoryPanel {
        weeks: table.weeks.clone(),
        series,
        panels,
        warnings,
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `week,<columns...>,mask` where mask has a `1` per missing cell.
pub fn write_feature_table<W: Write>(table: &WeeklyFeatureTable, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["week".to_string()];
    header.extend(table.columns.iter().cloned());
    header.push("mask".into());
    w.write_record(&header)?;
    for (week, row) in table.weeks.iter().zip(&table.values) {
        let mut rec = vec![week.to_string()];
        rec.extend(row.iter().map(|v| cell(*v)));
        rec.push(row.iter().map(|v| if v.is_some() { '0' } else { '1' }).collect());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_feature_table<R: Read>(input: R) -> Result<WeeklyFeatureTable, AggregateError> {
    let bad = |m: String| AggregateError::Table(m);
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| bad(e.to_string()))?
        .iter()
        .map(String::from)
        .collect();
    if header.first().map(String::as_str) != Some("week") {
        return Err(bad("first column must be 'week'".into()));
    }
    let data_cols: Vec<usize> = (1..header.len()).filter(|&i| header[i] != "mask").collect();
    let mut weeks = Vec::new();
    let mut values = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let row_no = line + 2;
        weeks.push(
            rec[0]
                .parse::<u32>()
                .map_err(|_| bad(format!("row {row_no}: bad week '{}'", &rec[0])))?,
        );
        let row = data_cols
            .iter()
            .map(|&i| {
                let s = &rec[i];
                if s.is_empty() {
                    Ok(None)
                } else {
                    s.parse::<f64>()
                        .map(Some)
                        .map_err(|_| bad(format!("row {row_no}: bad value '{s}' in {}", header[i])))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        values.push(row);
    }
    Ok(WeeklyFeatureTable {
        weeks,
        columns: data_cols.iter().map(|&i| header[i].clone()).collect(),
        values,
        single_session_weeks: Vec::new(),
    })
}

pub fn write_correlations_csv<W: Write>(report: &CorrelationReport, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "label",
        "feature_a",
        "feature_b",
        "r",
        "p_raw",
        "q",
        "significant",
        "n_pairs",
    ])?;
    for e in &report.entries {
        w.write_record([
            format!("{}~{}", e.feature_a, e.feature_b),
            e.feature_a.clone(),
            e.feature_b.clone(),
            cell(e.r),
            cell(e.p_raw),
            cell(e.q),
            e.significant.to_string(),
            e.n_pairs.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads back `correlations.csv`; the family size is recounted from the
/// entries with a defined r.
pub fn read_correlations_csv<R: Read>(input: R, q_threshold: f64) -> Result<CorrelationReport, AggregateError> {
    let entries: Vec<CorrelationEntry> = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| AggregateError::Table(e.to_string()))?;
    let family_size = entries.iter().filter(|e| e.r.is_some()).count();
    Ok(CorrelationReport {
        entries,
        family_size,
        q_threshold,
    })
}
