use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Traceability record attached to every output file.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub seed: u64,
    pub version: String,
    pub command: String,
}

impl Provenance {
    pub fn new(config_text: &str, seed: u64, command: &str) -> Self {
        let digest = Sha256::digest(config_text.as_bytes());
        Provenance { config_sha256: hex::encode(digest), seed, version: VERSION.to_string(), command: command.to_string() }
    }

    fn csv_header(&self) -> String {
        format!("# tfwlab {} {} config_sha256={} seed={}\n", self.version, self.command, self.config_sha256, self.seed)
    }
}

pub struct Output {
    pub dir: PathBuf,
    pub provenance: Provenance,
}

impl Output {
    pub fn new(dir: &Path, provenance: Provenance) -> Result<Self, String> {
        fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
        Ok(Output { dir: dir.to_path_buf(), provenance })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// JSON with sorted keys: `{"provenance": …, "timestamp": …, "result": …}`.
    pub fn json(&self, name: &str, result: &impl Serialize) -> Result<(), String> {
        let mut root = serde_json::Map::new();
        root.insert("provenance".into(), serde_json::to_value(&self.provenance).map_err(|e| e.to_string())?);
        root.insert("timestamp".into(), Value::String(chrono::Utc::now().to_rfc3339()));
        // non-finite numbers become null
        root.insert("result".into(), serde_json::to_value(result).map_err(|e| e.to_string())?);
        let mut text = serde_json::to_string_pretty(&Value::Object(root)).map_err(|e| e.to_string())?;
        text.push('\n');
        fs::write(self.path(name), text).map_err(|e| format!("cannot write {name}: {e}"))
    }

    /// RFC-4180 CSV preceded by a single `#` provenance line.
    pub fn csv(&self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<(), String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).map_err(|e| e.to_string())?;
        for r in rows {
            w.write_record(r).map_err(|e| e.to_string())?;
        }
        let body = w.into_inner().map_err(|e| e.to_string())?;
        let mut bytes = self.provenance.csv_header().into_bytes();
        bytes.extend(body);
        fs::write(self.path(name), bytes).map_err(|e| format!("cannot write {name}: {e}"))
    }

    pub fn bytes(&self, name: &str, data: &[u8]) -> Result<(), String> {
        fs::write(self.path(name), data).map_err(|e| format!("cannot write {name}: {e}"))
    }

    pub fn text(&self, name: &str, data: &str) -> Result<(), String> {
        self.bytes(name, data.as_bytes())
    }
}

pub fn num(x: f64) -> String {
    format!("{x:.17e}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// A plotted series: name and `(x, y)` points.
pub type Series = (String, Vec<(f64, f64)>);

/// Static SVG line chart; `log_y` plots `log10 y` and drops nonpositive points.
pub fn line_chart(title: &str, xlabel: &str, ylabel: &str, series: &[Series], log_x: bool, log_y: bool) -> String {
    let (w, h, m) = (640.0, 420.0, 60.0);
    let tx = |x: f64| if log_x { x.log10() } else { x };
    let ty = |y: f64| if log_y { y.log10() } else { y };
    let pts: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|(_, p)| p.iter().filter(|(x, y)| (!log_x || *x > 0.0) && (!log_y || *y > 0.0)).map(|&(x, y)| (tx(x), ty(y))).collect())
        .collect();
    let all: Vec<&(f64, f64)> = pts.iter().flatten().filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in &all {
        x0 = x0.min(p.0);
        x1 = x1.max(p.0);
        y0 = y0.min(p.1);
        y1 = y1.max(p.1);
    }
    if all.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-300 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-300 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let sy = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(s, r#"<line x1="{m}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, h - m, w - m, h - m);
    let _ = writeln!(s, r#"<line x1="{m}" y1="{m}" x2="{m}" y2="{}" stroke="black"/>"#, h - m);
    let lx = if log_x { format!("log10 {xlabel}") } else { xlabel.to_string() };
    let ly = if log_y { format!("log10 {ylabel}") } else { ylabel.to_string() };
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, w / 2.0, h - 15.0, escape(&lx));
    let _ = writeln!(s, r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>"#, h / 2.0, h / 2.0, escape(&ly));
    for (v, anchor_y) in [(y0, sy(y0)), (y1, sy(y1))] {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{v:.3}</text>"#, m - 4.0, anchor_y + 4.0);
    }
    for (v, anchor_x) in [(x0, sx(x0)), (x1, sx(x1))] {
        let _ = writeln!(s, r#"<text x="{anchor_x}" y="{}" text-anchor="middle">{v:.3}</text>"#, h - m + 16.0);
    }
    for (k, (p, (name, _))) in pts.iter().zip(series).enumerate() {
        let c = colors[k % colors.len()];
        let path: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        for &(x, y) in p {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{c}"/>"#, sx(x), sy(y));
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" fill="{c}">{}</text>"#, w - m - 120.0, m + 16.0 * k as f64, escape(name));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_skips_nonpositive_points_on_log_axis() {
        let s = line_chart("t", "x", "y", &[("a".into(), vec![(1.0, 1.0), (2.0, 0.0), (3.0, 0.1)])], false, true);
        assert_eq!(s.matches("<circle").count(), 2);
    }

    #[test]
    fn provenance_hash_is_stable() {
        let p = Provenance::new("seed = 1\n", 1, "solve");
        assert_eq!(p.config_sha256.len(), 64);
        assert_eq!(p.config_sha256, Provenance::new("seed = 1\n", 9, "mc").config_sha256);
    }
}
