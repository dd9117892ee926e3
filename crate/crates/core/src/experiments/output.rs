use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::risk::{RiskCurve, RiskRecord};
use crate::error::{Error, Result};

pub const RISK_COLUMNS: [&str; 11] = [
    "n",
    "d",
    "alpha",
    "fold_count",
    "train_mse",
    "train_se",
    "test_mse",
    "test_se",
    "beta_norm_sq",
    "empirical_snr",
    "seed",
];

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e))
}

/// Writes a header and rows as CSV, replacing any existing file.
pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn risk_row(r: &RiskRecord) -> Vec<String> {
    vec![
        r.n.to_string(),
        r.d.to_string(),
        format_float(r.alpha),
        r.fold_count.to_string(),
        format_float(r.train_mse),
        format_float(r.train_se),
        format_float(r.test_mse),
        format_float(r.test_se),
        format_float(r.beta_norm_sq),
        format_float(r.empirical_snr),
        r.seed.to_string(),
    ]
}

pub fn write_risk_csv(curve: &RiskCurve, path: &Path) -> Result<()> {
    write_csv(path, &RISK_COLUMNS, curve.records.iter().map(risk_row))
}

/// Parses a file written by [`write_risk_csv`].
pub fn read_risk_csv(path: &Path) -> Result<RiskCurve> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let header = rdr.headers().map_err(|e| csv_error(path, e))?;
    if header.iter().ne(RISK_COLUMNS) {
        return Err(parse_err(1, format!("unexpected header {header:?}")));
    }
    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| parse_err(line, e.to_string()))?;
        let field = |k: usize| row.get(k).unwrap_or_default();
        let int = |k: usize| {
            field(k)
                .parse::<u64>()
                .map_err(|e| parse_err(line, format!("{}: {e}", RISK_COLUMNS[k])))
        };
        let float = |k: usize| {
            field(k)
                .parse::<f64>()
                .map_err(|e| parse_err(line, format!("{}: {e}", RISK_COLUMNS[k])))
        };
        records.push(RiskRecord {
            n: int(0)? as usize,
            d: int(1)? as usize,
            alpha: float(2)?,
            fold_count: int(3)? as usize,
            train_mse: float(4)?,
            train_se: float(5)?,
            test_mse: float(6)?,
            test_se: float(7)?,
            beta_norm_sq: float(8)?,
            empirical_snr: float(9)?,
            seed: int(10)?,
        });
    }
    Ok(RiskCurve { records })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// A minimal line chart rendered to standalone SVG.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Plot `log10(y)`; nonpositive values are dropped.
    pub log_y: bool,
    pub series: Vec<Series>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl LineChart {
    pub fn to_svg(&self) -> String {
        let ty = |y: f64| if self.log_y { y.log10() } else { y };
        let pts: Vec<Vec<(f64, f64)>> = self
            .series
            .iter()
            .map(|s| {
                s.points
                    .iter()
                    .filter(|(x, y)| x.is_finite() && y.is_finite() && (!self.log_y || *y > 0.0))
                    .map(|&(x, y)| (x, ty(y)))
                    .collect()
            })
            .collect();
        let all = pts.iter().flatten();
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in all {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if x0 > x1 {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if x1 == x0 {
            x1 = x0 + 1.0;
        }
        if y1 == y0 {
            y1 = y0 + 1.0;
        }
        let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            s,
            r#"<path d="M{m} {t} V{b} H{r}" fill="none" stroke="black"/>"#,
            m = MARGIN,
            t = MARGIN,
            b = HEIGHT - MARGIN,
            r = WIDTH - MARGIN
        );
        let y_label = if self.log_y {
            format!("log10 {}", self.y_label)
        } else {
            self.y_label.clone()
        };
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 20.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{y}" text-anchor="middle" transform="rotate(-90 16 {y})">{}</text>"#,
            escape(&y_label),
            y = HEIGHT / 2.0
        );
        for (v, anchor, x, y) in [
            (x0, "start", px(x0), HEIGHT - MARGIN + 16.0),
            (x1, "end", px(x1), HEIGHT - MARGIN + 16.0),
            (y0, "end", MARGIN - 6.0, py(y0)),
            (y1, "end", MARGIN - 6.0, py(y1)),
        ] {
            let _ = writeln!(s, r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}">{v:.4}</text>"#);
        }
        for (i, (series, p)) in self.series.iter().zip(&pts).enumerate() {
            let colour = PALETTE[i % PALETTE.len()];
            let coords: Vec<String> = p
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                coords.join(" ")
            );
            let ly = MARGIN + 16.0 * i as f64;
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{ly}" fill="{colour}" text-anchor="end">{}</text>"#,
                WIDTH - MARGIN,
                escape(&series.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Test MSE against `d`, one line per `(n, α)`.
pub fn risk_chart(curve: &RiskCurve) -> LineChart {
    LineChart {
        title: "Ridge test risk".into(),
        x_label: "d".into(),
        y_label: "test MSE".into(),
        log_y: true,
        series: curve
            .series_keys()
            .into_iter()
            .map(|(n, alpha)| Series {
                label: format!("n={n} alpha={alpha}"),
                points: curve
                    .series(n, alpha)
                    .iter()
                    .map(|r| (r.d as f64, r.test_mse))
                    .collect(),
            })
            .collect(),
    }
}

pub fn write_svg(chart: &LineChart, path: &Path) -> Result<()> {
    fs::write(path, chart.to_svg()).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Svg,
}

/// Writes a risk curve as CSV or as an SVG chart.
pub fn emit_results(curve: &RiskCurve, path: &Path, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Csv => write_risk_csv(curve, path),
        OutputFormat::Svg => write_svg(&risk_chart(curve), path),
    }
}
