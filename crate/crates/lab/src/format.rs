//! On-disk formats.
//!
//! * curve: one JSON object `{"topology": "closed"|"open", "truncated": bool, "points": [[x, y], ...]}`
//! * flow history: JSON Lines, a header `{"topology", "count", "truncated"}` (plus
//!   `singular_time` and `resample_events` when present) followed by one
//!   `{"t", "points"}` object per slice
//! * similarity: `{"alpha", "rotation", "V", "shift": {"offset", "reversed"}, "residual"}`
//! * splice sidecar: the similarity fields plus `mode`, `copies` and `junctions`
//!
//! Floats are written in shortest round-trip form, so reading a written file
//! gives back the same values bit for bit.

use std::fs;
use std::path::Path;

use csflab_core::breather::{SpliceMode, SpliceResult};
use csflab_core::{Curve, FlowHistory, IndexShift, Mat2, Similarity, Topology, Vec2};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveFile {
    topology: Topology,
    #[serde(default)]
    truncated: bool,
    points: Vec<Vec2>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HistoryHeader {
    topology: Topology,
    count: usize,
    #[serde(default)]
    truncated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    singular_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    resample_events: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SliceLine {
    t: f64,
    points: Vec<Vec2>,
}

/// Unknown fields are ignored, so a detect report or a splice sidecar can be
/// read back as a similarity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityFile {
    pub alpha: f64,
    pub rotation: Mat2,
    #[serde(rename = "V")]
    pub translation: Vec2,
    pub shift: IndexShift,
    #[serde(default)]
    pub residual: f64,
}

impl From<&Similarity> for SimilarityFile {
    fn from(s: &Similarity) -> Self {
        SimilarityFile {
            alpha: s.alpha,
            rotation: s.rotation,
            translation: s.translation,
            shift: s.shift,
            residual: s.residual,
        }
    }
}

impl SimilarityFile {
    pub fn to_similarity(&self) -> CliResult<Similarity> {
        let mut s = Similarity::new(self.alpha, self.rotation, self.translation, self.shift)?;
        s.residual = self.residual;
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Junction {
    pub time: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sidecar {
    pub mode: SpliceMode,
    pub alpha: f64,
    pub rotation: Mat2,
    #[serde(rename = "V")]
    pub translation: Vec2,
    pub shift: IndexShift,
    pub residual: f64,
    pub copies: usize,
    pub junctions: Vec<Junction>,
}

impl Sidecar {
    pub fn of(splice: &SpliceResult) -> Self {
        let s = &splice.similarity;
        Sidecar {
            mode: splice.mode,
            alpha: s.alpha,
            rotation: s.rotation,
            translation: s.translation,
            shift: s.shift,
            residual: s.residual,
            copies: splice.copies,
            junctions: splice
                .junction_times
                .iter()
                .zip(&splice.junction_gaps)
                .map(|(&time, &gap)| Junction { time, gap })
                .collect(),
        }
    }

    pub fn into_splice(self, history: FlowHistory) -> CliResult<SpliceResult> {
        let mut similarity = Similarity::new(self.alpha, self.rotation, self.translation, self.shift)?;
        similarity.residual = self.residual;
        Ok(SpliceResult {
            history,
            mode: self.mode,
            similarity,
            copies: self.copies,
            junction_times: self.junctions.iter().map(|j| j.time).collect(),
            junction_gaps: self.junctions.iter().map(|j| j.gap).collect(),
        })
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))
}

/// Byte offset of serde_json's 1-based line/column position within `text`.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

fn format_error(path: &Path, offset: usize, message: impl std::fmt::Display) -> CliError {
    CliError::new("format", format!("{} at byte {offset}: {message}", path.display()))
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str, base: usize) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| {
        let offset = if e.line() == 0 { 0 } else { byte_offset(text, e.line(), e.column()) };
        format_error(path, base + offset, e)
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("in-memory values serialize")
}

pub fn curve_to_string(curve: &Curve) -> String {
    let file = CurveFile {
        topology: curve.topology(),
        truncated: curve.is_truncated(),
        points: curve.points().to_vec(),
    };
    to_json(&file) + "\n"
}

pub fn curve_from_str(path: &Path, text: &str) -> CliResult<Curve> {
    let file: CurveFile = parse(path, text, 0)?;
    Curve::new(file.points, file.topology, file.truncated)
        .map_err(|e| format_error(path, 0, e))
}

pub fn read_curve(path: &Path) -> CliResult<Curve> {
    curve_from_str(path, &read_text(path)?)
}

pub fn write_curve(path: &Path, curve: &Curve) -> CliResult<()> {
    write_text(path, &curve_to_string(curve))
}

pub fn history_to_string(history: &FlowHistory) -> String {
    let header = HistoryHeader {
        topology: history.topology(),
        count: history.count(),
        truncated: history.is_truncated(),
        singular_time: history.singular_time,
        resample_events: history.resample_events.clone(),
    };
    let mut out = to_json(&header);
    out.push('\n');
    for sl in history.slices() {
        out.push_str(&to_json(&SliceLine {
            t: sl.t,
            points: sl.curve.points().to_vec(),
        }));
        out.push('\n');
    }
    out
}

pub fn history_from_str(path: &Path, text: &str) -> CliResult<FlowHistory> {
    let mut lines = Vec::new();
    let mut base = 0;
    for line in text.split_inclusive('\n') {
        if !line.trim().is_empty() {
            lines.push((base, line));
        }
        base += line.len();
    }
    let (&(hbase, hline), rest) = lines
        .split_first()
        .ok_or_else(|| format_error(path, 0, "empty flow history"))?;
    let header: HistoryHeader = parse(path, hline, hbase)?;
    if rest.is_empty() {
        return Err(format_error(path, text.len(), "header without slices"));
    }
    let mut history: Option<FlowHistory> = None;
    for &(b, line) in rest {
        let sl: SliceLine = parse(path, line, b)?;
        if sl.points.len() != header.count {
            return Err(format_error(
                path,
                b,
                format!("slice has {} points, header says {}", sl.points.len(), header.count),
            ));
        }
        let curve = Curve::new(sl.points, header.topology, header.truncated).map_err(|e| format_error(path, b, e))?;
        match history.as_mut() {
            None => history = Some(FlowHistory::new(sl.t, curve).map_err(|e| format_error(path, b, e))?),
            Some(h) => h.push(sl.t, curve).map_err(|e| format_error(path, b, e))?,
        }
    }
    let mut history = history.expect("at least one slice");
    history.singular_time = header.singular_time;
    history.resample_events = header.resample_events;
    Ok(history)
}

pub fn read_history(path: &Path) -> CliResult<FlowHistory> {
    history_from_str(path, &read_text(path)?)
}

pub fn write_history(path: &Path, history: &FlowHistory) -> CliResult<()> {
    write_text(path, &history_to_string(history))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    parse(path, &read_text(path)?, 0)
}

/// Pretty JSON with a trailing newline. Map keys keep declaration order.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    write_text(path, &(pretty(value) + "\n"))
}

pub fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("in-memory values serialize")
}

pub fn read_similarity(path: &Path) -> CliResult<Similarity> {
    let file: SimilarityFile = read_json(path)?;
    file.to_similarity().map_err(|e| format_error(path, 0, e.message))
}

pub fn write_csv(path: &Path, text: &str) -> CliResult<()> {
    write_text(path, text)
}
