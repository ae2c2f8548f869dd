//! Output emission: CSV tables, SVG charts, and the jump-trace record
//! stream. Only this module touches the filesystem during a run; every
//! write goes to a temporary file first and is renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use monotrack_core::jump::{JumpMetrics, JumpTrace};
use monotrack_core::{SweepPoint, SweepResult};

/// Shortest decimal that round-trips the value, capped at 9 significant
/// digits (locale-independent).
pub fn format_g9(value: f64) -> String {
    if !value.is_finite() {
        return format!("{value}");
    }
    for digits in 1..=9 {
        let candidate = format!("{value:.*e}", digits - 1);
        if candidate.parse::<f64>() == Ok(value) {
            return trim_exponent(&candidate);
        }
    }
    trim_exponent(&format!("{value:.8e}"))
}

/// Rewrites `1.250000e2`-style output as a plain decimal when that is
/// short, keeping the exponent form for extreme magnitudes.
fn trim_exponent(s: &str) -> String {
    let value: f64 = s.parse().expect("formatter output parses");
    let abs = value.abs();
    if value == 0.0 {
        return "0".to_string();
    }
    if abs >= 1e-4 && abs < 1e12 {
        // Plain decimal keeps at most 9 significant digits by construction.
        let plain = format!("{value}");
        if plain.parse::<f64>() == Ok(value) && plain.len() <= s.len() + 6 {
            return plain;
        }
    }
    s.to_string()
}

/// Writes bytes atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// CSV for a sweep: one row per grid point with axis values, metric values,
/// and a failure flag/description.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::new();
    for axis in &result.axes {
        out.push_str(&axis.name);
        out.push(',');
    }
    out.push_str(&result.metric_names.join(","));
    out.push_str(",failed,failure\n");
    for (idx, point) in result.points.iter().enumerate() {
        for coord in result.coords(idx) {
            out.push_str(&format_g9(coord));
            out.push(',');
        }
        match point {
            SweepPoint::Metrics(values) => {
                let cells: Vec<String> = values.iter().map(|v| format_g9(*v)).collect();
                out.push_str(&cells.join(","));
                out.push_str(",0,\n");
            }
            SweepPoint::Failed(failure) => {
                for _ in 0..result.metric_names.len() {
                    out.push(',');
                }
                out.push_str("1,");
                out.push_str(&format!("{failure:?}").replace(',', ";"));
                out.push('\n');
            }
        }
    }
    out
}

/// CSV with a single row of jump metrics.
pub fn jump_csv(metrics: &JumpMetrics) -> String {
    format!(
        "max_h_com,max_h_clearance,contact_ratio,peak_power\n{},{},{},{}\n",
        format_g9(metrics.max_h_com),
        format_g9(metrics.max_h_clearance),
        format_g9(metrics.contact_ratio),
        format_g9(metrics.peak_mechanical_power),
    )
}

// ---------------------------------------------------------------------------
// SVG plotting
// ---------------------------------------------------------------------------

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 420.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_B: f64 = 48.0;
const MARGIN_T: f64 = 28.0;
const MARGIN_R: f64 = 20.0;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(1e-300);
        MARGIN_L + (v - self.x_min) / span * (PLOT_W - MARGIN_L - MARGIN_R)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(1e-300);
        PLOT_H - MARGIN_B - (v - self.y_min) / span * (PLOT_H - MARGIN_B - MARGIN_T)
    }
}

fn svg_header(title: &str) -> String {
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"12\">\n",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<text x=\"{tx}\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">{title}</text>\n",
        ),
        w = PLOT_W,
        h = PLOT_H,
        tx = PLOT_W / 2.0,
        title = title
    )
}

fn axes(frame: &Frame, x_label: &str, y_label: &str) -> String {
    let mut s = String::new();
    let x0 = frame.x(frame.x_min);
    let x1 = frame.x(frame.x_max);
    let y0 = frame.y(frame.y_min);
    let y1 = frame.y(frame.y_max);
    s.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"black\"/>\n"
    ));
    s.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"black\"/>\n"
    ));
    for i in 0..=4 {
        let xv = frame.x_min + (frame.x_max - frame.x_min) * i as f64 / 4.0;
        let yv = frame.y_min + (frame.y_max - frame.y_min) * i as f64 / 4.0;
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            frame.x(xv),
            y0 + 16.0,
            format_sig3(xv)
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            x0 - 6.0,
            frame.y(yv) + 4.0,
            format_sig3(yv)
        ));
    }
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{x_label}</text>\n",
        (x0 + x1) / 2.0,
        PLOT_H - 10.0
    ));
    s.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{y_label}</text>\n",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    ));
    s
}

fn format_sig3(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if a >= 0.01 && a < 1000.0 {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

fn polyline(frame: &Frame, points: &[(f64, f64)], color: &str) -> String {
    let coords: Vec<String> = points
        .iter()
        .map(|(x, y)| format!("{:.2},{:.2}", frame.x(*x), frame.y(*y)))
        .collect();
    format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
        coords.join(" ")
    )
}

/// Line chart of every metric column over a one-axis sweep; failed points
/// leave gaps.
pub fn sweep_line_svg(result: &SweepResult) -> String {
    let axis = &result.axes[0];
    let colors = ["#1a6fb5", "#d95f02", "#1b9e77", "#7570b3", "#666666"];
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for (mi, name) in result.metric_names.iter().enumerate() {
        let mut pts = Vec::new();
        for (i, point) in result.points.iter().enumerate() {
            if let Some(v) = point.metric(mi) {
                if v.is_finite() {
                    pts.push((axis.values[i], v));
                    y_min = y_min.min(v);
                    y_max = y_max.max(v);
                }
            }
        }
        series.push((name.clone(), pts));
    }
    if !y_min.is_finite() {
        y_min = 0.0;
        y_max = 1.0;
    }
    if y_min == y_max {
        y_min -= 0.5;
        y_max += 0.5;
    }
    let frame = Frame {
        x_min: axis.values.first().copied().unwrap_or(0.0),
        x_max: axis.values.last().copied().unwrap_or(1.0),
        y_min,
        y_max,
    };
    let mut svg = svg_header(&format!("sweep over {}", axis.name));
    svg.push_str(&axes(&frame, &axis.name, "metric value"));
    for (i, (name, pts)) in series.iter().enumerate() {
        if pts.is_empty() {
            continue;
        }
        let color = colors[i % colors.len()];
        svg.push_str(&polyline(&frame, pts, color));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" fill=\"{color}\">{name}</text>\n",
            PLOT_W - MARGIN_R - 150.0,
            MARGIN_T + 14.0 * (i as f64 + 1.0)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Heat map of the first metric over a two-axis sweep, with the selected
/// design point starred when the fixed snapshot carries one.
pub fn sweep_heatmap_svg(result: &SweepResult) -> String {
    let (ax_a, ax_b) = (&result.axes[0], &result.axes[1]);
    let metric = 0;
    let values: Vec<Option<f64>> = result.points.iter().map(|p| p.metric(metric)).collect();
    let finite: Vec<f64> = values.iter().flatten().copied().filter(|v| v.is_finite()).collect();
    let (lo, hi) = finite
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let span = (hi - lo).max(1e-300);

    let frame = Frame {
        x_min: 0.0,
        x_max: ax_b.values.len() as f64,
        y_min: 0.0,
        y_max: ax_a.values.len() as f64,
    };
    let cell_w = frame.x(1.0) - frame.x(0.0);
    let cell_h = frame.y(0.0) - frame.y(1.0);
    let mut svg = svg_header(&format!(
        "{} over {} x {}",
        result.metric_names[metric], ax_a.name, ax_b.name
    ));
    for ia in 0..ax_a.values.len() {
        for ib in 0..ax_b.values.len() {
            let idx = ia * ax_b.values.len() + ib;
            let fill = match values[idx] {
                Some(v) if v.is_finite() => {
                    let t = (v - lo) / span;
                    // Blue (low) to red (high).
                    let r = (255.0 * t) as u8;
                    let b = (255.0 * (1.0 - t)) as u8;
                    let g = (96.0 + 64.0 * (1.0 - (2.0 * t - 1.0).abs())) as u8;
                    format!("rgb({r},{g},{b})")
                }
                _ => "rgb(220,220,220)".to_string(),
            };
            svg.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{fill}\"/>\n",
                frame.x(ib as f64),
                frame.y((ia + 1) as f64),
                cell_w,
                cell_h
            ));
        }
    }
    // Tick labels on both axes (first/last values).
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\">{} = {}..{}</text>\n",
        MARGIN_L,
        PLOT_H - 10.0,
        ax_b.name,
        format_sig3(ax_b.values[0]),
        format_sig3(*ax_b.values.last().unwrap())
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" transform=\"rotate(-90 16 {})\" text-anchor=\"middle\">{} = {}..{}</text>\n",
        PLOT_H / 2.0,
        PLOT_H / 2.0,
        ax_a.name,
        format_sig3(ax_a.values[0]),
        format_sig3(*ax_a.values.last().unwrap())
    ));
    // Star the selected design point if present in the snapshot.
    let find = |key: &str| {
        result
            .fixed
            .iter()
            .find(|(name, _)| name.starts_with(key))
            .map(|(_, v)| *v)
    };
    if let (Some(sel_a), Some(sel_b)) = (find("selected_gr_alpha"), find("selected_gr_beta")) {
        let pos_a = ax_a.values.iter().position(|v| (v - sel_a).abs() < 1e-9);
        let pos_b = ax_b.values.iter().position(|v| (v - sel_b).abs() < 1e-9);
        if let (Some(ia), Some(ib)) = (pos_a, pos_b) {
            let cx = frame.x(ib as f64 + 0.5);
            let cy = frame.y(ia as f64 + 0.5);
            svg.push_str(&format!(
                "<text x=\"{cx}\" y=\"{}\" text-anchor=\"middle\" font-size=\"18\">*</text>\n",
                cy + 6.0
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Trace plot: CoM height and rear-wheel clearance over time with dashed
/// markers at lift-off and apogee.
pub fn trace_svg(trace: &JumpTrace) -> String {
    let times: Vec<f64> = trace.samples.iter().map(|s| s.state.time).collect();
    let h_com: Vec<(f64, f64)> = trace
        .samples
        .iter()
        .map(|s| (s.state.time, s.kinematics.h_com))
        .collect();
    let h_clear: Vec<(f64, f64)> = trace
        .samples
        .iter()
        .map(|s| (s.state.time, s.kinematics.h_clearance))
        .collect();
    let y_min = h_clear
        .iter()
        .map(|p| p.1)
        .fold(f64::INFINITY, f64::min)
        .min(0.0);
    let y_max = h_com.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let frame = Frame {
        x_min: times.first().copied().unwrap_or(0.0),
        x_max: times.last().copied().unwrap_or(1.0),
        y_min,
        y_max: y_max + 0.05,
    };
    let mut svg = svg_header("jump trace");
    svg.push_str(&axes(&frame, "time (s)", "height (m)"));
    svg.push_str(&polyline(&frame, &h_com, "#1a6fb5"));
    svg.push_str(&polyline(&frame, &h_clear, "#d95f02"));
    for (label, t) in [("lift-off", trace.t_liftoff), ("apogee", trace.t_apogee)] {
        if let Some(t) = t {
            let x = frame.x(t);
            svg.push_str(&format!(
                "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"#444\" stroke-dasharray=\"5,4\"/>\n",
                frame.y(frame.y_min),
                frame.y(frame.y_max)
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-size=\"11\">{label}</text>\n",
                x + 3.0,
                MARGIN_T + 12.0
            ));
        }
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" fill=\"#1a6fb5\">h_com</text>\n",
        PLOT_W - 150.0,
        MARGIN_T + 14.0
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" fill=\"#d95f02\">h_clearance</text>\n",
        PLOT_W - 150.0,
        MARGIN_T + 28.0
    ));
    svg.push_str("</svg>\n");
    svg
}

/// Serializes a jump trace as a JSON record stream for replay: a meta
/// object, then one record per sample.
pub fn trace_json(trace: &JumpTrace) -> String {
    #[derive(serde::Serialize)]
    struct Meta<'a> {
        t0: f64,
        t_liftoff: &'a Option<f64>,
        t_apogee: &'a Option<f64>,
        samples: usize,
    }
    let meta = serde_json::to_string(&Meta {
        t0: trace.t0,
        t_liftoff: &trace.t_liftoff,
        t_apogee: &trace.t_apogee,
        samples: trace.samples.len(),
    })
    .expect("meta serializes");
    let mut out = String::with_capacity(trace.samples.len() * 256);
    out.push_str(&meta);
    out.push('\n');
    for sample in &trace.samples {
        out.push_str(&serde_json::to_string(sample).expect("sample serializes"));
        out.push('\n');
    }
    out
}

/// Emits a sweep's outputs into `dir` per the requested formats, returning
/// the files written.
pub fn emit_sweep(
    result: &SweepResult,
    dir: &Path,
    formats: &[String],
) -> std::io::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if formats.iter().any(|f| f == "csv") {
        let path = dir.join("results.csv");
        write_atomic(&path, sweep_csv(result).as_bytes())?;
        written.push(path);
    }
    if formats.iter().any(|f| f == "svg") {
        let defined = result.points.iter().any(|p| p.metrics().is_some());
        if !defined {
            eprintln!("warning: sweep contains only failures; skipping plot.svg");
        } else {
            let svg = match result.axes.len() {
                1 => sweep_line_svg(result),
                2 => sweep_heatmap_svg(result),
                _ => String::new(),
            };
            if !svg.is_empty() {
                let path = dir.join("plot.svg");
                write_atomic(&path, svg.as_bytes())?;
                written.push(path);
            }
        }
    }
    Ok(written)
}
