use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ClassScores, ConfusionMatrix, MetricsError, RowNormalized};
use crate::pipeline::{ClassLabel, NUM_CLASSES};

/// Everything an evaluation run produces, in a stable JSON layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub split: String,
    /// Checksum of the dataset manifest that was evaluated, hex.
    pub dataset_id: Option<String>,
    /// Checksum of the checkpoint file, hex.
    pub checkpoint_id: Option<String>,
    pub model: Option<String>,
    pub classes: Vec<String>,
    pub total: u64,
    pub accuracy: f64,
    pub micro_f1: f64,
    pub macro_f1: f64,
    pub per_class: Vec<ClassScores>,
    pub confusion: ConfusionMatrix,
    pub row_normalized: RowNormalized,
}

impl EvalReport {
    pub fn new(confusion: ConfusionMatrix, split: impl Into<String>) -> Result<Self, MetricsError> {
        let accuracy = confusion.accuracy()?;
        let micro_f1 = confusion.micro_f1()?;
        assert_eq!(micro_f1, accuracy, "micro-F1 must equal accuracy");
        Ok(Self {
            split: split.into(),
            dataset_id: None,
            checkpoint_id: None,
            model: None,
            classes: ClassLabel::ALL.iter().map(|c| c.name().to_string()).collect(),
            total: confusion.total(),
            accuracy,
            micro_f1,
            macro_f1: confusion.macro_f1()?,
            per_class: confusion.per_class()?.to_vec(),
            confusion,
            row_normalized: confusion.row_normalize(),
        })
    }

    /// Write `<stem>.json`, `<stem>.txt` and `<stem>.svg` into `dir`.
    pub fn write_all(&self, dir: impl AsRef<Path>, stem: &str) -> Result<Vec<PathBuf>, MetricsError> {
        let dir = dir.as_ref();
        let mut written = Vec::new();
        for f in [ReportFormat::Json, ReportFormat::Text, ReportFormat::Svg] {
            let path = dir.join(format!("{stem}.{}", f.extension()));
            fs::write(&path, render_report(self, f)).map_err(|source| MetricsError::Io {
                path: path.display().to_string(),
                source,
            })?;
            written.push(path);
        }
        Ok(written)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
    Svg,
}

impl ReportFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Text => "txt",
            ReportFormat::Svg => "svg",
        }
    }
}

pub fn render_report(report: &EvalReport, format: ReportFormat) -> Vec<u8> {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s.into_bytes()
        }
        ReportFormat::Text => render_text(report).into_bytes(),
        ReportFormat::Svg => render_svg(report).into_bytes(),
    }
}

fn render_text(r: &EvalReport) -> String {
    let mut s = String::new();
    let name_w = r.classes.iter().map(String::len).max().unwrap_or(5).max(5);
    let _ = writeln!(s, "split: {}  sequences: {}", r.split, r.total);
    if let Some(m) = &r.model {
        let _ = writeln!(s, "model: {m}");
    }
    if let Some(d) = &r.dataset_id {
        let _ = writeln!(s, "dataset: {d}");
    }
    if let Some(c) = &r.checkpoint_id {
        let _ = writeln!(s, "checkpoint: {c}");
    }
    let _ = writeln!(
        s,
        "accuracy {:.4}  micro-F1 {:.4}  macro-F1 {:.4}\n",
        r.accuracy, r.micro_f1, r.macro_f1
    );
    let _ = writeln!(
        s,
        "{:<name_w$}  {:>9}  {:>9}  {:>9}  {:>9}",
        "class", "precision", "recall", "f1", "support"
    );
    for (name, c) in r.classes.iter().zip(&r.per_class) {
        let flag = if c.precision_undefined || c.recall_undefined { " *" } else { "" };
        let _ = writeln!(
            s,
            "{name:<name_w$}  {:>9.4}  {:>9.4}  {:>9.4}  {:>9}{flag}",
            c.precision, c.recall, c.f1, c.support
        );
    }
    if r.per_class.iter().any(|c| c.precision_undefined || c.recall_undefined) {
        let _ = writeln!(s, "* zero denominator, reported as 0");
    }
    let cell_w = name_w.max(9);
    let _ = writeln!(s, "\nconfusion matrix (rows actual, columns predicted)");
    let _ = write!(s, "{:<name_w$}", "");
    for name in &r.classes {
        let _ = write!(s, "  {name:>cell_w$}");
    }
    s.push('\n');
    for (i, name) in r.classes.iter().enumerate() {
        let _ = write!(s, "{name:<name_w$}");
        for j in 0..NUM_CLASSES {
            let cell = format!(
                "{} ({:.1}%)",
                r.confusion.counts[i][j],
                100.0 * r.row_normalized.rows[i][j]
            );
            let _ = write!(s, "  {cell:>cell_w$}");
        }
        s.push('\n');
    }
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// White to dark blue.
fn heat(v: f64) -> String {
    let v = v.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * v).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(255.0, 31.0), lerp(255.0, 78.0), lerp(255.0, 121.0))
}

fn render_svg(r: &EvalReport) -> String {
    const W: f64 = 900.0;
    const H: f64 = 420.0;
    const BAR_X: f64 = 130.0;
    const BAR_W: f64 = 220.0;
    const ROW_H: f64 = 48.0;
    const TOP: f64 = 80.0;
    const GRID_X: f64 = 560.0;
    const CELL: f64 = 60.0;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let title = format!(
        "{} split: micro-F1 {:.4}, macro-F1 {:.4}, n = {}",
        r.split, r.micro_f1, r.macro_f1, r.total
    );
    let _ = writeln!(s, r#"<text x="20" y="28" font-size="16">{}</text>"#, xml_escape(&title));

    let _ = writeln!(s, r#"<text x="{BAR_X}" y="{}">F1 per class</text>"#, TOP - 16.0);
    for (i, (name, c)) in r.classes.iter().zip(&r.per_class).enumerate() {
        let y = TOP + i as f64 * ROW_H;
        let w = BAR_W * c.f1.clamp(0.0, 1.0);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            BAR_X - 8.0,
            y + 20.0,
            xml_escape(name)
        );
        let _ = writeln!(
            s,
            r##"<rect x="{BAR_X}" y="{y}" width="{BAR_W}" height="30" fill="#eeeeee"/>"##
        );
        let _ = writeln!(
            s,
            r##"<rect x="{BAR_X}" y="{y}" width="{w:.2}" height="30" fill="#1f4e79"/>"##
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">{:.3}</text>"#,
            BAR_X + BAR_W + 6.0,
            y + 20.0,
            c.f1
        );
    }

    let _ = writeln!(s, r#"<text x="{GRID_X}" y="{}">actual (rows) vs predicted (columns)</text>"#, TOP - 16.0);
    for i in 0..NUM_CLASSES {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            GRID_X - 8.0,
            TOP + i as f64 * CELL + CELL / 2.0 + 4.0,
            xml_escape(&r.classes[i])
        );
        for j in 0..NUM_CLASSES {
            let v = r.row_normalized.rows[i][j];
            let (x, y) = (GRID_X + j as f64 * CELL, TOP + i as f64 * CELL);
            let ink = if v > 0.5 { "white" } else { "black" };
            let _ = writeln!(
                s,
                r##"<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}" stroke="#999999"/>"##,
                heat(v)
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle" fill="{ink}">{:.1}%</text>"#,
                x + CELL / 2.0,
                y + CELL / 2.0 - 2.0,
                100.0 * v
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle" fill="{ink}" font-size="9">{}</text>"#,
                x + CELL / 2.0,
                y + CELL / 2.0 + 12.0,
                r.confusion.counts[i][j]
            );
        }
    }
    for (j, name) in r.classes.iter().enumerate() {
        let x = GRID_X + j as f64 * CELL + CELL / 2.0;
        let y = TOP + NUM_CLASSES as f64 * CELL + 14.0;
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" text-anchor="end" font-size="10" transform="rotate(-30 {x} {y})">{}</text>"#,
            xml_escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}
