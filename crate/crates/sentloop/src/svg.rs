//! Self-contained SVG charts, hand-rolled for determinism.
//!
//! No plotting dependency: every figure is assembled from rectangles,
//! polylines, and text, so output bytes depend only on input data (plus
//! the declared generator version below). Charts are sized for report
//! embedding and standalone viewing alike.

use crate::dynamics::{StabilityClass, StabilityDiagram};
use crate::error::Error;
use crate::Result;

/// Version stamp embedded in every produced SVG. Data files are
/// byte-stable across releases; figures are stable up to this string.
pub const SVG_VERSION_COMMENT: &str = "<!-- sentloop-svg 0.1.0 -->";

/// Region fill for each stability class.
pub fn class_color(class: StabilityClass) -> &'static str {
    match class {
        StabilityClass::MonotoneConvergent => "#2e7d32",
        StabilityClass::OscillatoryConvergent => "#a5d6a7",
        StabilityClass::Divergent => "#9e9e9e",
        StabilityClass::Marginal => "#f9a825",
    }
}

/// Line palette, reused cyclically across series.
const LINE_COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
const BAR_COLOR: &str = "#1f77b4";

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 46.0;
const MARGIN_BOTTOM: f64 = 58.0;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn map_x(&self, x: f64) -> f64 {
        let span = self.x_max - self.x_min;
        MARGIN_LEFT + (x - self.x_min) / span * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn map_y(&self, y: f64) -> f64 {
        let span = self.y_max - self.y_min;
        HEIGHT - MARGIN_BOTTOM - (y - self.y_min) / span * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn open_svg(out: &mut String) {
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    out.push_str(SVG_VERSION_COMMENT);
    out.push('\n');
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
    ));
}

fn push_title(out: &mut String, title: &str) {
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    ));
}

fn push_axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    out.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\" stroke=\"#333333\"/>\n"
    ));
    out.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\" stroke=\"#333333\"/>\n"
    ));
    for i in 0..=4 {
        let fx = frame.x_min + (frame.x_max - frame.x_min) * i as f64 / 4.0;
        let px = frame.map_x(fx);
        out.push_str(&format!(
            "<line x1=\"{px:.2}\" y1=\"{y0}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"#333333\"/>\n",
            y0 + 4.0
        ));
        out.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
            y0 + 18.0,
            fmt_tick(fx)
        ));
        let fy = frame.y_min + (frame.y_max - frame.y_min) * i as f64 / 4.0;
        let py = frame.map_y(fy);
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{x0}\" y2=\"{py:.2}\" stroke=\"#333333\"/>\n",
            x0 - 4.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>\n",
            x0 - 8.0,
            py + 4.0,
            fmt_tick(fy)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
        (x0 + x1) / 2.0,
        HEIGHT - 16.0,
        escape(x_label)
    ));
    out.push_str(&format!(
        "<text x=\"18\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">{}</text>\n",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    ));
}

fn fmt_tick(value: f64) -> String {
    let text = format!("{value:.3}");
    let trimmed = text.trim_end_matches('0').trim_end_matches('.');
    if trimmed == "-0" {
        "0".to_string()
    } else {
        trimmed.to_string()
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn finite_or_err(points: &[(f64, f64)]) -> Result<()> {
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidArgument(
            "chart data contains non-finite values".to_string(),
        ));
    }
    Ok(())
}

/// Multi-series line chart. Each entry pairs a legend label with its
/// points; at least one series with at least one point is required.
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[(&str, &[(f64, f64)])],
) -> Result<String> {
    if series.is_empty() || series.iter().all(|(_, pts)| pts.is_empty()) {
        return Err(Error::InvalidArgument(
            "line chart needs at least one point".to_string(),
        ));
    }
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for (_, points) in series {
        finite_or_err(points)?;
        for (x, y) in *points {
            x_min = x_min.min(*x);
            x_max = x_max.max(*x);
            y_min = y_min.min(*y);
            y_max = y_max.max(*y);
        }
    }
    if x_min == x_max {
        x_min -= 1.0;
        x_max += 1.0;
    }
    if y_min == y_max {
        y_min -= 1.0;
        y_max += 1.0;
    }
    // A little headroom keeps lines off the frame.
    let pad = (y_max - y_min) * 0.05;
    let frame = Frame {
        x_min,
        x_max,
        y_min: y_min - pad,
        y_max: y_max + pad,
    };

    let mut out = String::new();
    open_svg(&mut out);
    push_title(&mut out, title);
    push_axes(&mut out, &frame, x_label, y_label);

    for (index, (label, points)) in series.iter().enumerate() {
        let color = LINE_COLORS[index % LINE_COLORS.len()];
        if points.len() == 1 {
            let (x, y) = points[0];
            out.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                frame.map_x(x),
                frame.map_y(y)
            ));
        } else if !points.is_empty() {
            let coords: Vec<String> = points
                .iter()
                .map(|(x, y)| format!("{:.2},{:.2}", frame.map_x(*x), frame.map_y(*y)))
                .collect();
            out.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                coords.join(" ")
            ));
        }
        let legend_y = MARGIN_TOP + 16.0 * index as f64 + 4.0;
        out.push_str(&format!(
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"12\" height=\"4\" fill=\"{color}\"/>\n",
            WIDTH - MARGIN_RIGHT - 150.0,
            legend_y - 4.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{legend_y:.1}\">{}</text>\n",
            WIDTH - MARGIN_RIGHT - 132.0,
            escape(label)
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Vertical bar chart with a zero baseline; bars may be negative.
pub fn bar_chart(title: &str, y_label: &str, bars: &[(String, f64)]) -> Result<String> {
    if bars.is_empty() {
        return Err(Error::InvalidArgument(
            "bar chart needs at least one bar".to_string(),
        ));
    }
    if bars.iter().any(|(_, v)| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "chart data contains non-finite values".to_string(),
        ));
    }
    let mut y_min = 0.0f64;
    let mut y_max = 0.0f64;
    for (_, value) in bars {
        y_min = y_min.min(*value);
        y_max = y_max.max(*value);
    }
    if y_min == y_max {
        y_min -= 1.0;
        y_max += 1.0;
    }
    let pad = (y_max - y_min) * 0.08;
    let frame = Frame {
        x_min: 0.0,
        x_max: bars.len() as f64,
        y_min: y_min - pad,
        y_max: y_max + pad,
    };

    let mut out = String::new();
    open_svg(&mut out);
    push_title(&mut out, title);
    push_axes(&mut out, &frame, "", y_label);

    let slot = (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / bars.len() as f64;
    let bar_width = slot * 0.6;
    let zero_y = frame.map_y(0.0);
    for (index, (name, value)) in bars.iter().enumerate() {
        let x = MARGIN_LEFT + slot * index as f64 + (slot - bar_width) / 2.0;
        let value_y = frame.map_y(*value);
        let (top, height) = if *value >= 0.0 {
            (value_y, zero_y - value_y)
        } else {
            (zero_y, value_y - zero_y)
        };
        out.push_str(&format!(
            "<rect x=\"{x:.2}\" y=\"{top:.2}\" width=\"{bar_width:.2}\" height=\"{height:.2}\" fill=\"{BAR_COLOR}\"/>\n"
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
            x + bar_width / 2.0,
            HEIGHT - MARGIN_BOTTOM + 18.0,
            escape(name)
        ));
    }
    out.push_str(&format!(
        "<line x1=\"{MARGIN_LEFT}\" y1=\"{zero_y:.2}\" x2=\"{:.1}\" y2=\"{zero_y:.2}\" stroke=\"#333333\" stroke-dasharray=\"4 3\"/>\n",
        WIDTH - MARGIN_RIGHT
    ));
    out.push_str("</svg>\n");
    Ok(out)
}

/// Stability diagram heatmap. Consecutive same-class cells in a row are
/// merged into one rectangle, so typical diagrams compress to a few
/// rectangles per row regardless of resolution.
pub fn stability_heatmap(diagram: &StabilityDiagram) -> Result<String> {
    let resolution = diagram.resolution;
    let frame = Frame {
        x_min: diagram.alpha_range.0,
        x_max: diagram.alpha_range.1,
        y_min: diagram.k_range.0,
        y_max: diagram.k_range.1,
    };

    let mut out = String::new();
    open_svg(&mut out);
    push_title(&mut out, "Closed-loop stability map");
    push_axes(
        &mut out,
        &frame,
        "alpha (sentiment inertia)",
        "k (net feedback)",
    );

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let cell_w = plot_w / resolution as f64;
    let cell_h = plot_h / resolution as f64;

    out.push_str("<g shape-rendering=\"crispEdges\">\n");
    for i_k in 0..resolution {
        // High k at the top.
        let y = MARGIN_TOP + (resolution - 1 - i_k) as f64 * cell_h;
        let mut run_start = 0usize;
        let mut run_class = diagram.class_at(0, i_k);
        for i_alpha in 1..=resolution {
            let boundary = i_alpha == resolution || diagram.class_at(i_alpha, i_k) != run_class;
            if boundary {
                let x = MARGIN_LEFT + run_start as f64 * cell_w;
                let w = (i_alpha - run_start) as f64 * cell_w;
                out.push_str(&format!(
                    "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{cell_h:.2}\" fill=\"{}\"/>\n",
                    class_color(run_class)
                ));
                if i_alpha < resolution {
                    run_start = i_alpha;
                    run_class = diagram.class_at(i_alpha, i_k);
                }
            }
        }
    }
    out.push_str("</g>\n");

    let legend_entries = [
        StabilityClass::MonotoneConvergent,
        StabilityClass::OscillatoryConvergent,
        StabilityClass::Marginal,
        StabilityClass::Divergent,
    ];
    for (index, class) in legend_entries.iter().enumerate() {
        let x = MARGIN_LEFT + 150.0 * index as f64;
        let y = HEIGHT - 14.0;
        out.push_str(&format!(
            "<rect x=\"{x:.1}\" y=\"{:.1}\" width=\"12\" height=\"12\" fill=\"{}\" stroke=\"#333333\"/>\n",
            y - 10.0,
            class_color(*class)
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{y:.1}\">{}</text>\n",
            x + 16.0,
            class.as_str()
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}
