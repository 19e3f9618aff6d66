//! Comma-separated sensor tables: thermal ROI statistics, environment
//! readings, husbandry events and the audio clip list.
//!
//! Row numbers in errors are 1-based file line numbers (the header is line 1).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

use super::IngestError;

pub const THERMAL_HEADER: [&str; 7] = ["room", "week", "date", "region", "t_min_c", "t_max_c", "t_mean_c"];
pub const ENV_HEADER: [&str; 6] = ["room", "date", "week", "session", "temp_c", "rh_pct"];
pub const EVENT_HEADER: [&str; 5] = ["room", "timestamp", "week", "kind", "note"];
pub const CLIP_HEADER: [&str; 5] = ["clip_id", "room", "week", "day", "path"];

/// Plausible surface temperature band, °C.
pub const TEMP_BAND_C: (f64, f64) = (-10.0, 60.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    Head,
    Foot,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::Head => "Head",
            Region::Foot => "Foot",
        })
    }
}

impl FromStr for Region {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "head" => Ok(Region::Head),
            "foot" => Ok(Region::Foot),
            other => Err(format!("unknown region '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Session {
    AM,
    PM,
}

impl fmt::Display for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Session::AM => "AM",
            Session::PM => "PM",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    CaretakerEntry,
    Maintenance,
    Equipment,
    Other,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::CaretakerEntry => "caretaker_entry",
            EventKind::Maintenance => "maintenance",
            EventKind::Equipment => "equipment",
            EventKind::Other => "other",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "caretaker_entry" => Some(EventKind::CaretakerEntry),
            "maintenance" => Some(EventKind::Maintenance),
            "equipment" => Some(EventKind::Equipment),
            "other" => Some(EventKind::Other),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalRecord {
    pub room: u32,
    pub week: u32,
    pub capture_date: NaiveDate,
    pub region: Region,
    pub t_min_c: f64,
    pub t_max_c: f64,
    pub t_mean_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvRecord {
    pub room: u32,
    pub date: NaiveDate,
    pub week: u32,
    pub session: Session,
    pub temp_c: f64,
    pub rh_pct: f64,
    /// Columns beyond the analysis schema, carried through verbatim.
    pub extras: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub room: u32,
    pub timestamp: NaiveDateTime,
    pub week: u32,
    pub kind: EventKind,
    pub note: String,
}

/// One row of the audio clip list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipEntry {
    pub clip_id: String,
    pub room: u32,
    pub week: u32,
    pub day: u32,
    /// WAV path relative to the list's directory.
    pub path: String,
}

/// Parsed rows plus non-fatal diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<R> {
    pub records: Vec<R>,
    pub warnings: Vec<String>,
}

struct Rows {
    header: Vec<String>,
    rows: Vec<(usize, csv::StringRecord)>,
}

fn read_rows(text: &str) -> Result<Rows, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| IngestError::Csv {
            row: 1,
            reason: e.to_string(),
        })?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| IngestError::Csv {
            row: e.position().map_or(0, |p| p.line() as usize),
            reason: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        rows.push((line, rec));
    }
    Ok(Rows { header, rows })
}

fn check_header(found: &[String], expected: &[&str], allow_extra: bool) -> Result<(), IngestError> {
    let prefix_ok = found.len() >= expected.len() && found.iter().zip(expected).all(|(a, b)| a == b);
    if !prefix_ok || (!allow_extra && found.len() != expected.len()) {
        return Err(IngestError::Header {
            expected: expected.join(","),
            found: found.join(","),
        });
    }
    Ok(())
}

fn field(rec: &csv::StringRecord, i: usize) -> &str {
    rec.get(i).unwrap_or("")
}

fn num<T: FromStr>(rec: &csv::StringRecord, i: usize, row: usize, name: &str) -> Result<T, IngestError> {
    let raw = field(rec, i);
    raw.parse().map_err(|_| IngestError::Csv {
        row,
        reason: format!("unparsable number '{raw}' in column {name}"),
    })
}

fn finite(v: f64, row: usize, name: &str) -> Result<f64, IngestError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(IngestError::Csv {
            row,
            reason: format!("non-finite value in column {name}"),
        })
    }
}

fn date(rec: &csv::StringRecord, i: usize, row: usize) -> Result<NaiveDate, IngestError> {
    let raw = field(rec, i);
    NaiveDate::parse_from_str(raw, "%Y-%m-%d").map_err(|_| IngestError::Csv {
        row,
        reason: format!("unparsable date '{raw}'"),
    })
}

/// Accepts ISO-8601 local date-times with `T` or space separators and
/// optional seconds.
pub fn parse_datetime(raw: &str) -> Option<NaiveDateTime> {
    [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ]
    .iter()
    .find_map(|f| NaiveDateTime::parse_from_str(raw, f).ok())
}

pub fn parse_thermal_csv(text: &str) -> Result<Vec<ThermalRecord>, IngestError> {
    let rows = read_rows(text)?;
    check_header(&rows.header, &THERMAL_HEADER, false)?;
    rows.rows
        .iter()
        .map(|(row, rec)| {
            let row = *row;
            let region = field(rec, 3)
                .parse::<Region>()
                .map_err(|reason| IngestError::Csv { row, reason })?;
            let t_min_c = finite(num(rec, 4, row, "t_min_c")?, row, "t_min_c")?;
            let t_max_c = finite(num(rec, 5, row, "t_max_c")?, row, "t_max_c")?;
            let t_mean_c = finite(num(rec, 6, row, "t_mean_c")?, row, "t_mean_c")?;
            if !(t_min_c <= t_mean_c && t_mean_c <= t_max_c) {
                return Err(IngestError::Csv {
                    row,
                    reason: format!("ordering violation row {row}: need t_min <= t_mean <= t_max"),
                });
            }
            for t in [t_min_c, t_max_c, t_mean_c] {
                if !(TEMP_BAND_C.0..=TEMP_BAND_C.1).contains(&t) {
                    return Err(IngestError::Csv {
                        row,
                        reason: format!("temperature {t} outside plausible band"),
                    });
                }
            }
            Ok(ThermalRecord {
                room: num(rec, 0, row, "room")?,
                week: num(rec, 1, row, "week")?,
                capture_date: date(rec, 2, row)?,
                region,
                t_min_c,
                t_max_c,
                t_mean_c,
            })
        })
        .collect()
}

pub fn parse_env_csv(text: &str) -> Result<Vec<EnvRecord>, IngestError> {
    let rows = read_rows(text)?;
    check_header(&rows.header, &ENV_HEADER, true)?;
    let extra_names = &rows.header[ENV_HEADER.len()..];
    rows.rows
        .iter()
        .map(|(row, rec)| {
            let row = *row;
            let session = match field(rec, 3).to_ascii_uppercase().as_str() {
                "AM" => Session::AM,
                "PM" => Session::PM,
                other => {
                    return Err(IngestError::Csv {
                        row,
                        reason: format!("unknown session '{other}'"),
                    })
                }
            };
            let rh_pct = finite(num(rec, 5, row, "rh_pct")?, row, "rh_pct")?;
            if !(0.0..=100.0).contains(&rh_pct) {
                return Err(IngestError::Csv {
                    row,
                    reason: format!("humidity out of range: {rh_pct}"),
                });
            }
            let extras = extra_names
                .iter()
                .enumerate()
                .map(|(j, name)| (name.clone(), field(rec, ENV_HEADER.len() + j).to_owned()))
                .collect();
            Ok(EnvRecord {
                room: num(rec, 0, row, "room")?,
                date: date(rec, 1, row)?,
                week: num(rec, 2, row, "week")?,
                session,
                temp_c: finite(num(rec, 4, row, "temp_c")?, row, "temp_c")?,
                rh_pct,
                extras,
            })
        })
        .collect()
}

/// Parses the husbandry event log; output is sorted by timestamp (stable).
pub fn parse_event_log(text: &str) -> Result<Parsed<EventRecord>, IngestError> {
    let rows = read_rows(text)?;
    check_header(&rows.header, &EVENT_HEADER, false)?;
    let mut warnings = Vec::new();
    let mut records = Vec::with_capacity(rows.rows.len());
    for (row, rec) in &rows.rows {
        let row = *row;
        let raw_ts = field(rec, 1);
        let timestamp = parse_datetime(raw_ts).ok_or_else(|| IngestError::Csv {
            row,
            reason: format!("unparsable timestamp row {row}: '{raw_ts}'"),
        })?;
        let raw_kind = field(rec, 3);
        let kind = EventKind::parse(raw_kind).unwrap_or_else(|| {
            let msg = format!("row {row}: unknown event kind '{raw_kind}' mapped to other");
            log::warn!("{msg}");
            warnings.push(msg);
            EventKind::Other
        });
        records.push(EventRecord {
            room: num(rec, 0, row, "room")?,
            timestamp,
            week: num(rec, 2, row, "week")?,
            kind,
            note: field(rec, 4).to_owned(),
        });
    }
    records.sort_by_key(|r| r.timestamp);
    Ok(Parsed { records, warnings })
}

pub fn parse_clip_list(text: &str) -> Result<Vec<ClipEntry>, IngestError> {
    let rows = read_rows(text)?;
    check_header(&rows.header, &CLIP_HEADER, false)?;
    rows.rows
        .iter()
        .map(|(row, rec)| {
            Ok(ClipEntry {
                clip_id: field(rec, 0).to_owned(),
                room: num(rec, 1, *row, "room")?,
                week: num(rec, 2, *row, "week")?,
                day: num(rec, 3, *row, "day")?,
                path: field(rec, 4).to_owned(),
            })
        })
        .collect()
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub fn write_thermal_csv(records: &[ThermalRecord]) -> String {
    let mut out = THERMAL_HEADER.join(",");
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.room, r.week, r.capture_date, r.region, r.t_min_c, r.t_max_c, r.t_mean_c
        ));
    }
    out
}

/// Writes env rows; extra columns are the union of all records' extras.
pub fn write_env_csv(records: &[EnvRecord]) -> String {
    let extra_names: Vec<&String> = {
        let mut names: Vec<&String> = records.iter().flat_map(|r| r.extras.keys()).collect();
        names.sort();
        names.dedup();
        names
    };
    let mut out = ENV_HEADER.join(",");
    for n in &extra_names {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}",
            r.room, r.date, r.week, r.session, r.temp_c, r.rh_pct
        ));
        for n in &extra_names {
            out.push(',');
            out.push_str(&csv_escape(r.extras.get(*n).map_or("", String::as_str)));
        }
        out.push('\n');
    }
    out
}

pub fn write_events_csv(records: &[EventRecord]) -> String {
    let mut out = EVENT_HEADER.join(",");
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.room,
            r.timestamp.format("%Y-%m-%dT%H:%M:%S"),
            r.week,
            r.kind.as_str(),
            csv_escape(&r.note)
        ));
    }
    out
}

pub fn write_clip_list(entries: &[ClipEntry]) -> String {
    let mut out = CLIP_HEADER.join(",");
    out.push('\n');
    for e in entries {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_escape(&e.clip_id),
            e.room,
            e.week,
            e.day,
            csv_escape(&e.path)
        ));
    }
    out
}
