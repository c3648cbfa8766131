//! Minimal standalone SVG line plots: axes, ticks, legend, and one path
//! per curve. Empirical curves are solid, asymptotic references dashed.

use std::fmt::Write as _;
use std::path::Path;

use axial::harness::{CurveStyle, NamedCurve};
use axial::{Error, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 180.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 60.0;

const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 0.01 && v.abs() < 10_000.0 {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

pub fn emit_svg(title: &str, curves: &[NamedCurve], path: &Path) -> Result<()> {
    if curves.is_empty() || curves.iter().all(|c| c.x.is_empty()) {
        return Err(Error::InvalidArgument("no curves to plot".into()));
    }
    let mut xmin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for c in curves {
        for &x in &c.x {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
        }
        for &y in &c.y {
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !(xmin.is_finite() && xmax.is_finite() && ymin.is_finite() && ymax.is_finite()) {
        return Err(Error::InvalidArgument("non-finite curve data".into()));
    }
    if xmax == xmin {
        xmax = xmin + 1.0;
    }
    if ymax == ymin {
        ymax = ymin + 1.0;
    }
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - xmin) / (xmax - xmin) * plot_w;
    let sy = |y: f64| MARGIN_T + plot_h - (y - ymin) / (ymax - ymin) * plot_h;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        MARGIN_L + plot_w / 2.0,
        xml_escape(title)
    )
    .unwrap();
    // Axes.
    writeln!(
        s,
        r#"<line x1="{MARGIN_L}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        MARGIN_T + plot_h,
        MARGIN_L + plot_w,
        MARGIN_T + plot_h
    )
    .unwrap();
    writeln!(
        s,
        r#"<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" y2="{}" stroke="black"/>"#,
        MARGIN_T + plot_h
    )
    .unwrap();
    // Ticks.
    for i in 0..=5 {
        let fx = xmin + (xmax - xmin) * i as f64 / 5.0;
        let px = sx(fx);
        let base = MARGIN_T + plot_h;
        writeln!(
            s,
            r#"<line x1="{px}" y1="{base}" x2="{px}" y2="{}" stroke="black"/>"#,
            base + 5.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{px}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            base + 20.0,
            fmt_tick(fx)
        )
        .unwrap();
        let fy = ymin + (ymax - ymin) * i as f64 / 5.0;
        let py = sy(fy);
        writeln!(
            s,
            r#"<line x1="{}" y1="{py}" x2="{MARGIN_L}" y2="{py}" stroke="black"/>"#,
            MARGIN_L - 5.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            MARGIN_L - 8.0,
            py + 4.0,
            fmt_tick(fy)
        )
        .unwrap();
    }
    // Curves.
    for (i, c) in curves.iter().enumerate() {
        let color = COLORS[i / 2 % COLORS.len()];
        let dash = match c.style {
            CurveStyle::Solid => "",
            CurveStyle::Dashed => r#" stroke-dasharray="6 4""#,
        };
        let mut d = String::new();
        for (j, (&x, &y)) in c.x.iter().zip(&c.y).enumerate() {
            let cmd = if j == 0 { 'M' } else { 'L' };
            write!(d, "{cmd}{:.2} {:.2} ", sx(x), sy(y)).unwrap();
        }
        writeln!(
            s,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            d.trim_end()
        )
        .unwrap();
    }
    // Legend.
    let lx = WIDTH - MARGIN_R + 10.0;
    for (i, c) in curves.iter().enumerate() {
        let color = COLORS[i / 2 % COLORS.len()];
        let y = MARGIN_T + 10.0 + 18.0 * i as f64;
        let dash = match c.style {
            CurveStyle::Solid => "",
            CurveStyle::Dashed => r#" stroke-dasharray="6 4""#,
        };
        writeln!(
            s,
            r#"<line x1="{lx}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            lx + 24.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text>"#,
            lx + 30.0,
            y + 4.0,
            xml_escape(&c.name)
        )
        .unwrap();
    }
    writeln!(s, "</svg>").unwrap();
    std::fs::write(path, s)?;
    Ok(())
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
