//! Deterministic CSV and SVG emission.

use std::io::Write;
use std::path::Path;

/// Fixed float formatting: CSV output must be byte-stable across runs.
pub fn fmt(v: f64) -> String {
    format!("{v:.12e}")
}

pub struct CsvTable {
    pub header_comments: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("# premia-csv v1\n");
        for c in &self.header_comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|&v| fmt(v)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.render().as_bytes())
    }
}

/// Minimal self-contained SVG line plot of `(x, y)` samples.
pub fn render_svg(title: &str, xs: &[f64], ys: &[f64]) -> String {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    const MARGIN: f64 = 50.0;
    let (x_lo, x_hi) = bounds(xs);
    let (mut y_lo, mut y_hi) = bounds(ys);
    if y_lo == y_hi {
        y_lo -= 1.0;
        y_hi += 1.0;
    }
    let sx = |x: f64| MARGIN + (x - x_lo) / (x_hi - x_lo) * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - (y - y_lo) / (y_hi - y_lo) * (H - 2.0 * MARGIN);
    let points: Vec<String> = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
        .collect();
    let zero_line = if y_lo < 0.0 && y_hi > 0.0 {
        format!(
            "<line x1='{:.2}' y1='{:.2}' x2='{:.2}' y2='{:.2}' stroke='#999' stroke-dasharray='4 4'/>",
            sx(x_lo), sy(0.0), sx(x_hi), sy(0.0)
        )
    } else {
        String::new()
    };
    format!(
        "<svg xmlns='http://www.w3.org/2000/svg' width='{W}' height='{H}' viewBox='0 0 {W} {H}'>\
<rect width='100%' height='100%' fill='white'/>\
<text x='{tx}' y='25' text-anchor='middle' font-family='monospace' font-size='14'>{title}</text>\
<line x1='{m}' y1='{ybase}' x2='{xend}' y2='{ybase}' stroke='black'/>\
<line x1='{m}' y1='{m}' x2='{m}' y2='{ybase}' stroke='black'/>\
{zero_line}\
<polyline fill='none' stroke='#1f77b4' stroke-width='1.5' points='{pts}'/>\
<text x='{m}' y='{ylab}' font-family='monospace' font-size='11'>[{ylo}, {yhi}]</text>\
</svg>\n",
        tx = W / 2.0,
        m = MARGIN,
        ybase = H - MARGIN,
        xend = W - MARGIN,
        pts = points.join(" "),
        ylab = H - MARGIN + 30.0,
        ylo = fmt(y_lo),
        yhi = fmt(y_hi),
    )
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}
