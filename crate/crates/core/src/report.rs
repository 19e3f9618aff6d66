//! CSV-backed SVG figures.
//!
//! Each figure is written as a CSV first and the SVG is rendered from the
//! parsed CSV alone, so [`render_svg`] on a figure's CSV reproduces its SVG
//! byte for byte.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::aggregate::{trajectory_panel, CorrelationReport, WeeklyFeatureTable, WeeklySummary, PANELS};
use crate::flow::Condition;
use crate::pipeline::PipelineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Weekly mean ± sd per table feature.
    Trajectories,
    /// Weekly before/during/after flow bars.
    FlowConditions,
    /// z-scored feature groups A, B and C.
    Panels,
    /// Pearson r matrix with significance marks.
    Heatmap,
}

impl Figure {
    pub const ALL: [Figure; 4] = [
        Figure::Trajectories,
        Figure::FlowConditions,
        Figure::Panels,
        Figure::Heatmap,
    ];

    pub fn stem(self) -> &'static str {
        match self {
            Figure::Trajectories => "trajectories",
            Figure::FlowConditions => "flow_conditions",
            Figure::Panels => "panels",
            Figure::Heatmap => "heatmap",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub feature: String,
    pub week: u32,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRow {
    pub week: u32,
    pub condition: Condition,
    pub mean: f64,
    pub sd: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelRow {
    pub panel: String,
    pub feature: String,
    pub week: u32,
    pub z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapRow {
    pub feature_a: String,
    pub feature_b: String,
    pub r: Option<f64>,
    pub q: Option<f64>,
    pub significant: bool,
}

/// Figure inputs: the weekly table, all weekly summaries and the
/// correlation report, for one room.
pub struct ReportInputs<'a> {
    pub room: u32,
    pub table: &'a WeeklyFeatureTable,
    pub summaries: &'a [WeeklySummary],
    pub correlations: &'a CorrelationReport,
}

fn to_csv<S: Serialize>(rows: &[S], header: &[&str]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).expect("in-memory");
    for r in rows {
        w.serialize(r).expect("in-memory");
    }
    w.into_inner().expect("in-memory")
}

fn from_csv<D: serde::de::DeserializeOwned>(bytes: &[u8]) -> Result<Vec<D>, PipelineError> {
    csv::Reader::from_reader(bytes)
        .deserialize()
        .collect::<Result<Vec<D>, _>>()
        .map_err(|e| PipelineError::Invalid(format!("figure data: {e}")))
}

pub fn trajectory_rows(inp: &ReportInputs<'_>) -> Vec<TrajectoryRow> {
    let mut out = Vec::new();
    for (j, name) in inp.table.columns.iter().enumerate() {
        for (i, &week) in inp.table.weeks.iter().enumerate() {
            let s = inp
                .summaries
                .iter()
                .find(|s| s.room == inp.room && s.week == week && &s.feature == name);
            out.push(TrajectoryRow {
                feature: name.clone(),
                week,
                mean: inp.table.values[i][j],
                sd: inp.table.values[i][j].and(s.and_then(|s| s.sd)),
                n: inp.table.values[i][j].and(s.map(|s| s.n)),
            });
        }
    }
    out
}

pub fn condition_rows(inp: &ReportInputs<'_>) -> Vec<ConditionRow> {
    let mut out = Vec::new();
    for &week in &inp.table.weeks {
        for c in Condition::ALL {
            let name = crate::aggregate::flow_feature(c);
            if let Some(s) = inp
                .summaries
                .iter()
                .find(|s| s.room == inp.room && s.week == week && s.feature == name)
            {
                out.push(ConditionRow {
                    week,
                    condition: c,
                    mean: s.mean,
                    sd: s.sd,
                    n: s.n,
                });
            }
        }
    }
    out
}

pub fn panel_rows(table: &WeeklyFeatureTable) -> Vec<PanelRow> {
    let panel = trajectory_panel(table);
    let mut out = Vec::new();
    for (p, members) in &panel.panels {
        for m in members {
            let z = panel.series(m).expect("panel members are kept series");
            for (&week, &v) in panel.weeks.iter().zip(z) {
                out.push(PanelRow {
                    panel: p.clone(),
                    feature: m.clone(),
                    week,
                    z: v,
                });
            }
        }
    }
    out
}

/// Full square matrix in table column order; the diagonal has r = 1.
pub fn heatmap_rows(columns: &[String], corr: &CorrelationReport) -> Vec<HeatmapRow> {
    let mut out = Vec::new();
    for a in columns {
        for b in columns {
            out.push(if a == b {
                HeatmapRow {
                    feature_a: a.clone(),
                    feature_b: b.clone(),
                    r: Some(1.0),
                    q: None,
                    significant: false,
                }
            } else {
                let e = corr.get(a, b);
                HeatmapRow {
                    feature_a: a.clone(),
                    feature_b: b.clone(),
                    r: e.and_then(|e| e.r),
                    q: e.and_then(|e| e.q),
                    significant: e.is_some_and(|e| e.significant),
                }
            });
        }
    }
    out
}

pub fn figure_csv(fig: Figure, inp: &ReportInputs<'_>) -> Vec<u8> {
    match fig {
        Figure::Trajectories => to_csv(&trajectory_rows(inp), &["feature", "week", "mean", "sd", "n"]),
        Figure::FlowConditions => to_csv(&condition_rows(inp), &["week", "condition", "mean", "sd", "n"]),
        Figure::Panels => to_csv(&panel_rows(inp.table), &["panel", "feature", "week", "z"]),
        Figure::Heatmap => to_csv(
            &heatmap_rows(&inp.table.columns, inp.correlations),
            &["feature_a", "feature_b", "r", "q", "significant"],
        ),
    }
}

/// Renders a figure from its CSV.
pub fn render_svg(fig: Figure, csv: &[u8], width: u32, height: u32) -> Result<Vec<u8>, PipelineError> {
    let (w, h) = (width as f64, height as f64);
    let svg = match fig {
        Figure::Trajectories => trajectories_svg(&from_csv(csv)?, w, h)?,
        Figure::FlowConditions => conditions_svg(&from_csv(csv)?, w, h)?,
        Figure::Panels => panels_svg(&from_csv(csv)?, w, h)?,
        Figure::Heatmap => heatmap_svg(&from_csv(csv)?, w, h)?,
    };
    Ok(svg.into_bytes())
}

/// CSV and SVG for every figure, with a one-line summary each.
pub fn render_figures(
    inp: &ReportInputs<'_>,
    width: u32,
    height: u32,
) -> Result<Vec<(String, Vec<u8>, String)>, PipelineError> {
    let mut out = Vec::new();
    for fig in Figure::ALL {
        let csv = figure_csv(fig, inp);
        let svg = render_svg(fig, &csv, width, height)?;
        let rows = csv.iter().filter(|&&b| b == b'\n').count().saturating_sub(1);
        out.push((format!("{}.csv", fig.stem()), csv, format!("{rows} plotted values")));
        out.push((format!("{}.svg", fig.stem()), svg, format!("{width}x{height} figure")));
    }
    Ok(out)
}

pub fn render_all(
    agg: &crate::pipeline::Aggregates,
    cfg: &crate::config::PipelineConfig,
) -> Result<Vec<(String, Vec<u8>, String)>, PipelineError> {
    let inp = ReportInputs {
        room: cfg.analysis.room,
        table: &agg.table,
        summaries: &agg.summaries,
        correlations: &agg.correlations,
    };
    render_figures(&inp, cfg.report.width, cfg.report.height)
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

/// Linear map from data range to a pixel box.
#[derive(Debug, Clone, Copy)]
struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let span = if self.x_hi > self.x_lo {
            self.x_hi - self.x_lo
        } else {
            1.0
        };
        self.left + (v - self.x_lo) / span * self.width
    }

    fn y(&self, v: f64) -> f64 {
        let span = if self.y_hi > self.y_lo {
            self.y_hi - self.y_lo
        } else {
            1.0
        };
        self.top + self.height - (v - self.y_lo) / span * self.height
    }
}

fn open(w: f64, h: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn text(s: &mut String, x: f64, y: f64, anchor: &str, t: &str) {
    let _ = writeln!(
        s,
        r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}">{}</text>"#,
        escape(t)
    );
}

/// Rounded step giving roughly four intervals over `span`.
fn tick_step(span: f64) -> f64 {
    let raw = span / 4.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if hi - lo <= 1e-12 * (1.0 + lo.abs()) {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

/// Box, y ticks and one x tick per week.
fn axes(s: &mut String, f: &Frame, weeks: &[u32], title: &str) {
    let _ = writeln!(
        s,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black" stroke-width="0.5"/>"#,
        f.left, f.top, f.width, f.height
    );
    text(s, f.left + f.width / 2.0, f.top - 4.0, "middle", title);
    let step = tick_step(f.y_hi - f.y_lo);
    let mut v = (f.y_lo / step).ceil() * step;
    while v <= f.y_hi {
        let y = f.y(v);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black" stroke-width="0.5"/>"#,
            f.left - 3.0,
            f.left
        );
        text(
            s,
            f.left - 5.0,
            y + 3.0,
            "end",
            &format!("{}", (v / step).round() * step),
        );
        v += step;
    }
    for &w in weeks {
        let x = f.x(w as f64);
        let y = f.top + f.height;
        let _ = writeln!(
            s,
            r#"<line class="xtick" data-week="{w}" x1="{x:.2}" y1="{y:.2}" x2="{x:.2}" y2="{:.2}" stroke="black" stroke-width="0.5"/>"#,
            y + 3.0
        );
        text(s, x, y + 13.0, "middle", &w.to_string());
    }
}

/// Polyline segments over consecutive present values.
fn polylines(s: &mut String, f: &Frame, pts: &[(u32, Option<f64>)], color: &str, label: &str) {
    let mut run: Vec<String> = Vec::new();
    let mut flush = |run: &mut Vec<String>| {
        if !run.is_empty() {
            let _ = writeln!(
                s,
                r#"<polyline class="series" data-feature="{}" points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                escape(label),
                run.join(" ")
            );
            run.clear();
        }
    };
    for &(w, v) in pts {
        match v {
            Some(v) => run.push(format!("{:.2},{:.2}", f.x(w as f64), f.y(v))),
            None => flush(&mut run),
        }
    }
    flush(&mut run);
}

fn distinct<T: PartialEq + Clone>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for it in items {
        if !out.contains(&it) {
            out.push(it);
        }
    }
    out
}

fn nonempty<T>(rows: &[T], what: &str) -> Result<(), PipelineError> {
    if rows.is_empty() {
        Err(PipelineError::Invalid(format!("no data for {what}")))
    } else {
        Ok(())
    }
}

fn trajectories_svg(rows: &[TrajectoryRow], w: f64, h: f64) -> Result<String, PipelineError> {
    nonempty(rows, "trajectories")?;
    let features = distinct(rows.iter().map(|r| r.feature.clone()));
    let weeks = distinct(rows.iter().map(|r| r.week));
    let cols = features.len().min(5);
    let nrows = features.len().div_ceil(cols);
    let (cw, ch) = (w / cols as f64, h / nrows as f64);
    let (x_lo, x_hi) = (
        *weeks.iter().min().unwrap() as f64 - 0.5,
        *weeks.iter().max().unwrap() as f64 + 0.5,
    );
    let mut s = open(w, h);
    for (k, feat) in features.iter().enumerate() {
        let sel: Vec<&TrajectoryRow> = rows.iter().filter(|r| &r.feature == feat).collect();
        let lo = sel
            .iter()
            .filter_map(|r| Some(r.mean? - r.sd.unwrap_or(0.0)))
            .fold(f64::INFINITY, f64::min);
        let hi = sel
            .iter()
            .filter_map(|r| Some(r.mean? + r.sd.unwrap_or(0.0)))
            .fold(f64::NEG_INFINITY, f64::max);
        let (y_lo, y_hi) = padded_range(lo, hi);
        let f = Frame {
            left: (k % cols) as f64 * cw + 40.0,
            top: (k / cols) as f64 * ch + 16.0,
            width: cw - 48.0,
            height: ch - 36.0,
            x_lo,
            x_hi,
            y_lo,
            y_hi,
        };
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(s, r#"<g class="panel" data-feature="{}">"#, escape(feat));
        // sd band over consecutive weeks with both mean and sd
        let band: Vec<(f64, f64, f64)> = sel
            .iter()
            .filter_map(|r| Some((r.week as f64, r.mean?, r.sd?)))
            .collect();
        if band.len() >= 2 {
            let upper: Vec<String> = band
                .iter()
                .map(|&(x, m, sd)| format!("{:.2},{:.2}", f.x(x), f.y(m + sd)))
                .collect();
            let lower: Vec<String> = band
                .iter()
                .rev()
                .map(|&(x, m, sd)| format!("{:.2},{:.2}", f.x(x), f.y(m - sd)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polygon class="band" points="{} {}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
                upper.join(" "),
                lower.join(" ")
            );
        }
        axes(&mut s, &f, &weeks, feat);
        let pts: Vec<(u32, Option<f64>)> = sel.iter().map(|r| (r.week, r.mean)).collect();
        polylines(&mut s, &f, &pts, color, feat);
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn conditions_svg(rows: &[ConditionRow], w: f64, h: f64) -> Result<String, PipelineError> {
    nonempty(rows, "flow conditions")?;
    let weeks = distinct(rows.iter().map(|r| r.week));
    let hi = rows.iter().map(|r| r.mean + r.sd.unwrap_or(0.0)).fold(0.0, f64::max);
    let f = Frame {
        left: 50.0,
        top: 20.0,
        width: w - 150.0,
        height: h - 50.0,
        x_lo: *weeks.iter().min().unwrap() as f64 - 0.5,
        x_hi: *weeks.iter().max().unwrap() as f64 + 0.5,
        y_lo: 0.0,
        y_hi: if hi > 0.0 { hi * 1.05 } else { 1.0 },
    };
    let mut s = open(w, h);
    axes(&mut s, &f, &weeks, "mean optical flow (px/frame) by entry condition");
    let slot = f.width / weeks.len() as f64;
    let bar = slot * 0.8 / 3.0;
    for r in rows {
        let k = Condition::ALL
            .iter()
            .position(|&c| c == r.condition)
            .expect("known condition");
        let x = f.x(r.week as f64) - 1.5 * bar + k as f64 * bar;
        let (y0, y1) = (f.y(0.0), f.y(r.mean));
        let _ = writeln!(
            s,
            r#"<rect class="bar" data-week="{}" data-condition="{}" x="{x:.2}" y="{y1:.2}" width="{bar:.2}" height="{:.2}" fill="{}"/>"#,
            r.week,
            r.condition,
            y0 - y1,
            PALETTE[k]
        );
        if let Some(sd) = r.sd {
            let cx = x + bar / 2.0;
            let _ = writeln!(
                s,
                r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="black" stroke-width="0.7"/>"#,
                f.y(r.mean + sd),
                f.y((r.mean - sd).max(0.0))
            );
        }
    }
    for (k, c) in Condition::ALL.iter().enumerate() {
        let y = f.top + 12.0 * k as f64 + 6.0;
        let x = f.left + f.width + 12.0;
        let _ = writeln!(
            s,
            r#"<rect x="{x:.2}" y="{:.2}" width="8" height="8" fill="{}"/>"#,
            y - 7.0,
            PALETTE[k]
        );
        text(&mut s, x + 12.0, y, "start", c.as_str());
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn panels_svg(rows: &[PanelRow], w: f64, h: f64) -> Result<String, PipelineError> {
    nonempty(rows, "panels")?;
    let weeks = distinct(rows.iter().map(|r| r.week));
    let lo = rows.iter().filter_map(|r| r.z).fold(f64::INFINITY, f64::min);
    let hi = rows.iter().filter_map(|r| r.z).fold(f64::NEG_INFINITY, f64::max);
    let (y_lo, y_hi) = padded_range(lo, hi);
    let names: Vec<&str> = PANELS.iter().map(|(p, _)| *p).collect();
    let ph = h / names.len() as f64;
    let mut s = open(w, h);
    for (k, p) in names.iter().enumerate() {
        let f = Frame {
            left: 40.0,
            top: k as f64 * ph + 16.0,
            width: w - 200.0,
            height: ph - 36.0,
            x_lo: *weeks.iter().min().unwrap() as f64 - 0.5,
            x_hi: *weeks.iter().max().unwrap() as f64 + 0.5,
            y_lo,
            y_hi,
        };
        let _ = writeln!(s, r#"<g class="panel" data-panel="{}">"#, escape(p));
        axes(&mut s, &f, &weeks, &format!("panel {p} (z-score)"));
        let members = distinct(rows.iter().filter(|r| r.panel == *p).map(|r| r.feature.clone()));
        for (i, m) in members.iter().enumerate() {
            let pts: Vec<(u32, Option<f64>)> = rows
                .iter()
                .filter(|r| r.panel == *p && &r.feature == m)
                .map(|r| (r.week, r.z))
                .collect();
            let color = PALETTE[i % PALETTE.len()];
            polylines(&mut s, &f, &pts, color, m);
            let y = f.top + 12.0 * i as f64 + 6.0;
            let x = f.left + f.width + 12.0;
            let _ = writeln!(
                s,
                r#"<rect x="{x:.2}" y="{:.2}" width="8" height="8" fill="{color}"/>"#,
                y - 7.0
            );
            text(&mut s, x + 12.0, y, "start", m);
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Diverging blue-white-red for r in [-1, 1].
fn diverging(r: f64) -> String {
    let t = r.clamp(-1.0, 1.0);
    let (end, a) = if t >= 0.0 {
        ((178.0, 24.0, 43.0), t)
    } else {
        ((33.0, 102.0, 172.0), -t)
    };
    let mix = |e: f64| (255.0 + (e - 255.0) * a).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(end.0), mix(end.1), mix(end.2))
}

fn heatmap_svg(rows: &[HeatmapRow], w: f64, h: f64) -> Result<String, PipelineError> {
    nonempty(rows, "heatmap")?;
    let names = distinct(rows.iter().map(|r| r.feature_a.clone()));
    let n = names.len() as f64;
    let (left, top) = (110.0, 20.0);
    let cell = ((w - left - 10.0) / n).min((h - top - 100.0) / n);
    let mut s = open(w, h);
    for r in rows {
        let i = names.iter().position(|x| x == &r.feature_a).expect("row feature");
        let j = names
            .iter()
            .position(|x| x == &r.feature_b)
            .ok_or_else(|| PipelineError::Invalid(format!("heatmap column {} has no row", r.feature_b)))?;
        let (x, y) = (left + j as f64 * cell, top + i as f64 * cell);
        let fill = r.r.map(diverging).unwrap_or_else(|| "#dddddd".into());
        let _ = writeln!(
            s,
            r#"<rect class="cell" data-a="{}" data-b="{}" x="{x:.2}" y="{y:.2}" width="{cell:.2}" height="{cell:.2}" fill="{fill}" stroke="white" stroke-width="0.5"/>"#,
            escape(&r.feature_a),
            escape(&r.feature_b)
        );
        let label = match r.r {
            Some(v) => format!("{v:.2}{}", if r.significant { "*" } else { "" }),
            None => "NA".into(),
        };
        text(&mut s, x + cell / 2.0, y + cell / 2.0 + 3.0, "middle", &label);
    }
    for (k, name) in names.iter().enumerate() {
        let c = k as f64 * cell + cell / 2.0;
        text(&mut s, left - 4.0, top + c + 3.0, "end", name);
        let (x, y) = (left + c, top + n * cell + 6.0);
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{y:.2}" text-anchor="end" transform="rotate(-60 {x:.2} {y:.2})">{}</text>"#,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregate::{CorrelationEntry, Modality};

    fn table() -> WeeklyFeatureTable {
        WeeklyFeatureTable {
            weeks: (5..=20).collect(),
            columns: vec!["head_temp_mean".into(), "zcr".into(), "rel_humidity".into()],
            values: (5..=20)
                .map(|w| {
                    vec![
                        Some(31.0 + 0.1 * w as f64),
                        Some(0.1 + 0.01 * ((w * 7) % 5) as f64),
                        Some(60.0 - w as f64),
                    ]
                })
                .collect(),
            single_session_weeks: Vec::new(),
        }
    }

    fn corr() -> CorrelationReport {
        let e = |a: &str, b: &str, sig: bool| CorrelationEntry {
            feature_a: a.into(),
            feature_b: b.into(),
            r: Some(if sig { 0.8 } else { 0.1 }),
            p_raw: Some(0.01),
            q: Some(if sig { 0.01 } else { 0.5 }),
            significant: sig,
            n_pairs: 16,
        };
        CorrelationReport {
            entries: vec![
                e("head_temp_mean", "zcr", false),
                e("head_temp_mean", "rel_humidity", false),
                e("zcr", "rel_humidity", true),
            ],
            family_size: 3,
            q_threshold: 0.05,
        }
    }

    fn summaries() -> Vec<WeeklySummary> {
        (5..=20)
            .flat_map(|w| {
                Condition::ALL.into_iter().map(move |c| WeeklySummary {
                    room: 1,
                    week: w,
                    modality: Modality::Flow,
                    feature: crate::aggregate::flow_feature(c).into(),
                    mean: 1.0 + w as f64 * 0.1,
                    sd: Some(0.2),
                    n: 3,
                })
            })
            .collect()
    }

    #[test]
    fn svgs_regenerate_from_csv() {
        let (t, c, s) = (table(), corr(), summaries());
        let inp = ReportInputs {
            room: 1,
            table: &t,
            summaries: &s,
            correlations: &c,
        };
        let files = render_figures(&inp, 720, 420).unwrap();
        assert_eq!(files.len(), 8);
        for fig in Figure::ALL {
            let csv = &files.iter().find(|f| f.0 == format!("{}.csv", fig.stem())).unwrap().1;
            let svg = &files.iter().find(|f| f.0 == format!("{}.svg", fig.stem())).unwrap().1;
            assert_eq!(&render_svg(fig, csv, 720, 420).unwrap(), svg);
        }
    }

    #[test]
    fn asterisk_iff_significant() {
        let rows = heatmap_rows(&table().columns, &corr());
        let svg = heatmap_svg(&rows, 720.0, 420.0).unwrap();
        assert_eq!(svg.matches('*').count(), 2);
        assert!(svg.contains("0.80*"));
    }

    #[test]
    fn trajectory_ticks_per_week() {
        let t = table();
        let c = corr();
        let inp = ReportInputs {
            room: 1,
            table: &t,
            summaries: &[],
            correlations: &c,
        };
        let svg = String::from_utf8(
            render_svg(Figure::Trajectories, &figure_csv(Figure::Trajectories, &inp), 720, 420).unwrap(),
        )
        .unwrap();
        let first = svg.split("</g>").next().unwrap();
        assert_eq!(first.matches(r#"class="xtick""#).count(), 16);
    }

    #[test]
    fn empty_rows_rejected() {
        assert!(render_svg(Figure::Heatmap, b"feature_a,feature_b,r,q,significant\n", 100, 100).is_err());
    }

    #[test]
    fn colors_at_extremes() {
        assert_eq!(diverging(0.0), "#ffffff");
        assert_eq!(diverging(1.0), "#b2182b");
        assert_eq!(diverging(-1.0), "#2166ac");
    }
}
