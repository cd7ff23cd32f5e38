//! Convergence plotting: parses exported convergence CSVs and renders the
//! cross-run mean curves as a self-contained SVG line chart.
//!
//! The vertical axis is logarithmic (base 10). Non-positive fitness values
//! cannot be placed on a log axis, so they are clamped to [`LOG_FLOOR`]
//! before scaling; a curve that reaches exactly zero therefore flattens at
//! the floor instead of disappearing. Rendering is deterministic: the same
//! series always produce byte-identical SVG text.

use std::fmt::Write as _;

use thiserror::Error;

/// Smallest value representable on the log axis; non-positive fitnesses are
/// clamped up to this before taking the logarithm.
pub const LOG_FLOOR: f64 = 1e-320;

/// Decade the floor maps to on the axis (clamped values sit exactly here).
const LOG_FLOOR_EXP: f64 = -320.0;

fn log_value(v: f64) -> f64 {
    if v > LOG_FLOOR {
        v.log10()
    } else {
        LOG_FLOOR_EXP
    }
}

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 190.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Errors from parsing convergence CSVs or rendering them.
#[derive(Debug, Error, PartialEq)]
pub enum PlotError {
    /// A CSV row could not be interpreted.
    #[error("malformed convergence CSV at row {row}: {msg}")]
    MalformedCsv { row: usize, msg: String },
    /// There is nothing to draw.
    #[error("no data to plot")]
    Empty,
    /// A series value cannot be placed on the axis even after clamping.
    #[error("series '{series}' contains a non-finite value")]
    NonFinite { series: String },
}

/// One named curve: (iteration, mean best fitness) points.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    /// Legend label.
    pub name: String,
    /// Points in drawing order.
    pub points: Vec<(f64, f64)>,
}

/// Extracts the (iteration, mean) curve from a convergence CSV: the header
/// must start with an `iteration` column and end with a `mean` column, and
/// every data row is read from those two columns.
pub fn parse_convergence_csv(text: &str) -> Result<Vec<(f64, f64)>, PlotError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(PlotError::MalformedCsv {
        row: 1,
        msg: "empty file".into(),
    })?;
    let fields: Vec<&str> = header.split(',').map(str::trim).collect();
    if fields.len() < 2 || fields[0] != "iteration" || *fields.last().unwrap() != "mean" {
        return Err(PlotError::MalformedCsv {
            row: 1,
            msg: format!(
                "expected header 'iteration,...,mean', found '{header}'"
            ),
        });
    }
    let columns = fields.len();
    let mut points = Vec::new();
    for (i, line) in lines {
        let row = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns {
            return Err(PlotError::MalformedCsv {
                row,
                msg: format!("expected {columns} fields, found {}", fields.len()),
            });
        }
        let iteration: f64 = fields[0].parse().map_err(|_| PlotError::MalformedCsv {
            row,
            msg: format!("unparseable iteration '{}'", fields[0]),
        })?;
        let mean: f64 = fields[columns - 1]
            .parse()
            .map_err(|_| PlotError::MalformedCsv {
                row,
                msg: format!("unparseable mean '{}'", fields[columns - 1]),
            })?;
        points.push((iteration, mean));
    }
    if points.is_empty() {
        return Err(PlotError::Empty);
    }
    Ok(points)
}

/// Renders the series as a complete standalone SVG document with a log-10
/// vertical axis, per-series colors, and a legend.
pub fn render_svg(series: &[Series]) -> Result<String, PlotError> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err(PlotError::Empty);
    }
    for s in series {
        if s.points.iter().any(|&(x, y)| !x.is_finite() || y.is_nan() || y == f64::INFINITY) {
            return Err(PlotError::NonFinite {
                series: s.name.clone(),
            });
        }
    }

    let x_max = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .fold(0.0_f64, f64::max)
        .max(1.0);
    let logs: Vec<f64> = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| log_value(p.1)))
        .collect();
    let log_lo = logs.iter().copied().fold(f64::INFINITY, f64::min).floor();
    let mut log_hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max).ceil();
    if log_hi <= log_lo {
        log_hi = log_lo + 1.0;
    }

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_px = |x: f64| MARGIN_LEFT + x / x_max * plot_w;
    let y_px = |v: f64| {
        MARGIN_TOP + (1.0 - (log_value(v) - log_lo) / (log_hi - log_lo)) * plot_h
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(
        svg,
        "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>"
    );

    // Horizontal gridlines and y tick labels, one per decade step.
    let step = (((log_hi - log_lo) / 8.0).ceil() as i64).max(1);
    let mut k = log_lo as i64;
    while k <= log_hi as i64 {
        let y = y_px(10.0_f64.powi(k as i32));
        let _ = writeln!(
            svg,
            "  <line x1=\"{MARGIN_LEFT}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
             stroke=\"#dddddd\" stroke-width=\"1\"/>",
            MARGIN_LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" fill=\"#333333\">1e{k}</text>",
            MARGIN_LEFT - 8.0,
            y + 4.0
        );
        k += step;
    }

    // X ticks at five even positions.
    let mut last_tick = -1.0;
    for i in 0..5 {
        let x = (x_max * f64::from(i) / 4.0).round();
        if x == last_tick {
            continue;
        }
        last_tick = x;
        let px = x_px(x);
        let _ = writeln!(
            svg,
            "  <line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" \
             stroke=\"#333333\" stroke-width=\"1\"/>",
            MARGIN_TOP + plot_h,
            MARGIN_TOP + plot_h + 5.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\" fill=\"#333333\">{x}</text>",
            MARGIN_TOP + plot_h + 20.0
        );
    }

    // Axes.
    let _ = writeln!(
        svg,
        "  <line x1=\"{MARGIN_LEFT}\" y1=\"{MARGIN_TOP}\" x2=\"{MARGIN_LEFT}\" y2=\"{:.2}\" \
         stroke=\"#333333\" stroke-width=\"1.5\"/>",
        MARGIN_TOP + plot_h
    );
    let _ = writeln!(
        svg,
        "  <line x1=\"{MARGIN_LEFT}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" \
         stroke=\"#333333\" stroke-width=\"1.5\"/>",
        MARGIN_TOP + plot_h,
        MARGIN_LEFT + plot_w,
        MARGIN_TOP + plot_h
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" fill=\"#333333\">iteration</text>",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        "  <text x=\"20\" y=\"{:.2}\" text-anchor=\"middle\" fill=\"#333333\" \
         transform=\"rotate(-90 20 {:.2})\">mean best fitness</text>",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );

    // Curves.
    for (i, s) in series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let color = PALETTE[i % PALETTE.len()];
        let mut points = String::new();
        for &(x, y) in &s.points {
            let _ = write!(points, "{:.2},{:.2} ", x_px(x), y_px(y));
        }
        let _ = writeln!(
            svg,
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            points.trim_end()
        );
    }

    // Legend.
    let legend_x = MARGIN_LEFT + plot_w + 16.0;
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let y = MARGIN_TOP + 12.0 + 22.0 * i as f64;
        let _ = writeln!(
            svg,
            "  <line x1=\"{legend_x:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
             stroke=\"{color}\" stroke-width=\"3\"/>",
            legend_x + 26.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.2}\" y=\"{:.2}\" fill=\"#333333\">{}</text>",
            legend_x + 32.0,
            y + 4.0,
            s.name
        );
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}
