//! CSV and SVG writers. Every file starts with the run manifest as comment
//! lines, and nothing time- or host-dependent is written, so identical
//! configurations give byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::Result;

/// 12 significant digits in scientific notation.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.11e}")
    }
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header_lines: &[String], columns: &[&str]) -> Self {
        let mut text = String::new();
        for line in header_lines {
            let _ = writeln!(text, "# {line}");
        }
        let _ = writeln!(text, "{}", columns.join(","));
        Csv { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, &self.text)?;
        Ok(())
    }
}

/// Makes free text safe for a CSV cell.
pub fn cell_text(s: &str) -> String {
    s.replace([',', '\n', '\r'], ";")
}

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Minimal polyline plot. With `log_y` only positive values are drawn, on a
/// log10 scale. Non-finite points break the line.
pub fn write_svg(path: &Path, header_lines: &[String], title: &str, x_label: &str, series: &[Series], log_y: bool) -> Result<()> {
    let (w, h, pad) = (640.0, 420.0, 50.0);
    let ty = |y: f64| if log_y { if y > 0.0 { y.log10() } else { f64::NAN } } else { y };
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|&(x, y)| (x, ty(y))))
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let range = |v: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        if lo.is_finite() && hi > lo { (lo, hi) } else if lo.is_finite() { (lo - 0.5, lo + 0.5) } else { (0.0, 1.0) }
    };
    let (x0, x1) = range(&mut pts.iter().map(|p| p.0));
    let (y0, y1) = range(&mut pts.iter().map(|p| p.1));
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);

    let mut s = String::new();
    let _ = writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">");
    for line in header_lines {
        let _ = writeln!(s, "<!-- {} -->", line.replace("--", "- -"));
    }
    let _ = writeln!(s, "<rect x=\"{pad}\" y=\"{pad}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>", w - 2.0 * pad, h - 2.0 * pad);
    let _ = writeln!(s, "<text x=\"{pad}\" y=\"30\">{}</text>", xml(title));
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\">{}</text>", w / 2.0, h - 15.0, xml(x_label));
    let yl = |v: f64| if log_y { format!("1e{v:.1}") } else { format!("{v:.4}") };
    let _ = writeln!(s, "<text x=\"5\" y=\"{}\">{}</text>", h - pad, yl(y0));
    let _ = writeln!(s, "<text x=\"5\" y=\"{}\">{}</text>", pad, yl(y1));
    let _ = writeln!(s, "<text x=\"{pad}\" y=\"{}\">{x0:.4}</text>", h - pad + 15.0);
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\">{x1:.4}</text>", w - pad - 40.0, h - pad + 15.0);
    for (k, ser) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" fill=\"{color}\">{}</text>", w - 150.0, pad + 15.0 * (k + 1) as f64, xml(&ser.name));
        let mut segment: Vec<String> = Vec::new();
        let flush = |seg: &mut Vec<String>, s: &mut String| {
            if seg.len() > 1 {
                let _ = writeln!(s, "<polyline fill=\"none\" stroke=\"{color}\" points=\"{}\"/>", seg.join(" "));
            }
            seg.clear();
        };
        for &(x, y) in &ser.points {
            let y = ty(y);
            if x.is_finite() && y.is_finite() {
                segment.push(format!("{:.2},{:.2}", sx(x), sy(y)));
            } else {
                flush(&mut segment, &mut s);
            }
        }
        flush(&mut segment, &mut s);
    }
    s.push_str("</svg>\n");
    fs::write(path, s)?;
    Ok(())
}

fn xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(-1.2360679774997898), "-1.23606797750e0");
        assert_eq!(num(0.0), "0.00000000000e0");
        assert_eq!(num(f64::NAN), "nan");
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn svg_skips_gaps() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.svg");
        let ser = Series {
            name: "r".into(),
            points: vec![(0.0, 1.0), (1.0, 2.0), (2.0, f64::NAN), (3.0, 1.0), (4.0, 0.5)],
        };
        write_svg(&p, &["x".into()], "t", "L", &[ser], true).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(text.matches("<polyline").count(), 2);
        assert!(text.contains("<!-- x -->"));
    }
}
