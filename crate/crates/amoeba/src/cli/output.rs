//! CSV tables and minimal SVG line plots.

use std::io::Write;
use std::path::Path;

use super::CliError;
use crate::dynamics::TrajectorySample;

/// Header of the trajectory table for `n` modes.
pub fn trajectory_header(n: usize) -> Vec<String> {
    let mut h: Vec<String> = ["t", "r1", "r2", "theta"].iter().map(|s| s.to_string()).collect();
    for k in 1..=n {
        h.push(format!("a{k}"));
        h.push(format!("b{k}"));
    }
    h.extend(["lagrangian", "vol_drift", "constraintF_resid"].iter().map(|s| s.to_string()));
    h
}

pub fn trajectory_rows(samples: &[TrajectorySample]) -> Vec<Vec<f64>> {
    samples
        .iter()
        .map(|s| {
            let mut row = vec![s.t, s.state.r[0], s.state.r[1], s.state.theta];
            row.extend(&s.shape);
            row.extend([s.lagrangian, s.vol_drift, s.constraint_f_resid]);
            row
        })
        .collect()
}

/// Write a numeric table with a header row to `out`, or to stdout.
pub fn write_csv(out: Option<&Path>, header: &[String], rows: &[Vec<f64>]) -> Result<(), CliError> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|e| io_err(p, e))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    let wrap = |e: csv::Error| CliError::Config(format!("out: {e}"));
    w.write_record(header).map_err(wrap)?;
    for r in rows {
        w.write_record(r.iter().map(|v| v.to_string())).map_err(wrap)?;
    }
    w.flush().map_err(|e| CliError::Config(format!("out: {e}")))
}

pub fn write_text(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| io_err(p, e)),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn io_err(p: &Path, e: std::io::Error) -> CliError {
    CliError::Config(format!("out: {}: {e}", p.display()))
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// One labelled polyline.
pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

/// Line plot with a viewBox fitted to the data. `equal_aspect` keeps one
/// unit the same length on both axes (used for paths in the plane).
pub fn svg_plot(title: &str, series: &[Series], equal_aspect: bool) -> String {
    let pts = series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let pad = |lo: f64, hi: f64| {
        let d = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
        (lo - d, hi + d)
    };
    (x0, x1) = pad(x0, x1);
    (y0, y1) = pad(y0, y1);
    let (w, h) = if equal_aspect {
        let s = 600.0 / (x1 - x0).max(y1 - y0);
        ((x1 - x0) * s, (y1 - y0) * s)
    } else {
        (800.0, 400.0)
    };
    let sx = w / (x1 - x0);
    let sy = h / (y1 - y0);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w:.2} {:.2}\" width=\"{w:.0}\" height=\"{:.0}\">\n",
        h + 30.0,
        h + 30.0
    );
    svg += &format!("<text x=\"8\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n", escape(title));
    svg += &format!("<rect x=\"0\" y=\"30\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"none\" stroke=\"#999\"/>\n");
    if y0 < 0.0 && y1 > 0.0 {
        let zy = 30.0 + (y1 - 0.0) * sy;
        svg += &format!("<line x1=\"0\" y1=\"{zy:.2}\" x2=\"{w:.2}\" y2=\"{zy:.2}\" stroke=\"#ddd\"/>\n");
    }
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", (x - x0) * sx, 30.0 + (y1 - y) * sy))
            .collect();
        svg += &format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\" points=\"{}\"><title>{}</title></polyline>\n",
            coords.join(" "),
            escape(s.label)
        );
        svg += &format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{}</text>\n",
            w - 90.0,
            46.0 + 14.0 * i as f64,
            escape(s.label)
        );
    }
    svg + "</svg>\n"
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let h = trajectory_header(2);
        assert_eq!(h.join(","), "t,r1,r2,theta,a1,b1,a2,b2,lagrangian,vol_drift,constraintF_resid");
    }

    #[test]
    fn svg_has_one_polyline_per_series() {
        let s = svg_plot(
            "path <r>",
            &[Series { label: "a", points: vec![(0.0, 0.0), (1.0, 2.0)] }, Series { label: "b", points: vec![(0.5, 1.0)] }],
            true,
        );
        assert_eq!(s.matches("<polyline").count(), 2);
        assert!(s.contains("path &lt;r&gt;"));
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn svg_survives_empty_and_flat_data() {
        let s = svg_plot("flat", &[Series { label: "z", points: vec![(1.0, 1.0), (1.0, 1.0)] }], false);
        assert!(!s.contains("NaN") && !s.contains("inf"));
    }
}
