//! Static SVG plots: line, scatter, and histogram, with axis labels.
//! Pure text generation; identical data renders identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::CliError;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 55.0;

#[derive(Debug, Clone)]
pub enum PlotKind {
    /// Connected polyline through (x, y) points.
    Line(Vec<(f64, f64)>),
    /// Unconnected markers.
    Scatter(Vec<(f64, f64)>),
    /// Bars over (lo, hi, count) bins.
    Histogram(Vec<(f64, f64, f64)>),
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub kind: PlotKind,
}

fn data_bounds(kind: &PlotKind) -> Option<(f64, f64, f64, f64)> {
    let mut bounds: Option<(f64, f64, f64, f64)> = None;
    let mut take = |x: f64, y: f64| {
        let b = bounds.get_or_insert((x, x, y, y));
        b.0 = b.0.min(x);
        b.1 = b.1.max(x);
        b.2 = b.2.min(y);
        b.3 = b.3.max(y);
    };
    match kind {
        PlotKind::Line(pts) | PlotKind::Scatter(pts) => {
            for &(x, y) in pts {
                take(x, y);
            }
        }
        PlotKind::Histogram(bins) => {
            for &(lo, hi, count) in bins {
                take(lo, 0.0);
                take(hi, count);
            }
        }
    }
    bounds
}

pub fn render_svg(plot: &Plot) -> Result<String, CliError> {
    let (mut x0, mut x1, mut y0, mut y1) =
        data_bounds(&plot.kind).ok_or_else(|| CliError::usage("empty plot series".to_string()))?;
    if x1 == x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 == y0 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad_y = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad_y, y1 + pad_y);

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = move |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * plot_w;
    let sy = move |y: f64| MARGIN_T + (1.0 - (y - y0) / (y1 - y0)) * plot_h;

    let mut svg = String::new();
    write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    )
    .unwrap();

    // Frame and ticks.
    write!(
        svg,
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n"
    )
    .unwrap();
    for i in 0..=5 {
        let fx = x0 + (x1 - x0) * i as f64 / 5.0;
        let px = sx(fx);
        write!(
            svg,
            "<line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n\
             <text x=\"{px:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            MARGIN_T + plot_h,
            MARGIN_T + plot_h + 5.0,
            MARGIN_T + plot_h + 18.0,
            tick_label(fx)
        )
        .unwrap();
        let fy = y0 + (y1 - y0) * i as f64 / 5.0;
        let py = sy(fy);
        write!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{MARGIN_L}\" y2=\"{py:.2}\" stroke=\"black\"/>\n\
             <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
            MARGIN_L - 5.0,
            MARGIN_L - 8.0,
            py + 4.0,
            tick_label(fy)
        )
        .unwrap();
    }

    // Labels.
    write!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 12.0,
        escape(&plot.x_label)
    )
    .unwrap();
    write!(
        svg,
        "<text x=\"16\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {:.2})\">{}</text>\n",
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0,
        escape(&plot.y_label)
    )
    .unwrap();
    write!(
        svg,
        "<text x=\"{:.2}\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_L + plot_w / 2.0,
        escape(&plot.title)
    )
    .unwrap();

    match &plot.kind {
        PlotKind::Line(pts) => {
            let mut points = String::new();
            for &(x, y) in pts {
                write!(points, "{:.2},{:.2} ", sx(x), sy(y)).unwrap();
            }
            write!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\"/>\n",
                points.trim_end()
            )
            .unwrap();
        }
        PlotKind::Scatter(pts) => {
            for &(x, y) in pts {
                write!(
                    svg,
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"1.5\" fill=\"#1f77b4\"/>\n",
                    sx(x),
                    sy(y)
                )
                .unwrap();
            }
        }
        PlotKind::Histogram(bins) => {
            for &(lo, hi, count) in bins {
                let x = sx(lo);
                let w = (sx(hi) - x).max(0.5);
                let y = sy(count);
                let h = sy(0.0) - y;
                write!(
                    svg,
                    "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" \
                     fill=\"#1f77b4\" stroke=\"white\" stroke-width=\"0.5\"/>\n"
                )
                .unwrap();
            }
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        format!("{v:.4}")
    } else {
        format!("{v:.3e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn emit_svg_plot(plot: &Plot, path: &Path) -> Result<(), CliError> {
    let body = render_svg(plot)?;
    std::fs::write(path, body)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}
