//! Minimal self-contained SVG line plots and heat maps.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

pub struct Plot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub log_y: bool,
    pub series: Vec<Series<'a>>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, W / 2.0, esc(title));
}

fn axes(out: &mut String, x: (f64, f64), y: (f64, f64), x_label: &str, y_label: &str, log_y: bool) {
    let (x0, x1, y0, y1) = (MARGIN, W - MARGIN / 2.0, H - MARGIN, MARGIN);
    let _ = writeln!(out, r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y0 - y1);
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let px = x0 + f * (x1 - x0);
        let py = y0 - f * (y0 - y1);
        let xv = x.0 + f * (x.1 - x.0);
        let yv = y.0 + f * (y.1 - y.0);
        let ytext = if log_y { format!("1e{yv:.1}") } else { format!("{yv:.3}") };
        let _ = writeln!(out, r#"<text x="{px}" y="{}" text-anchor="middle">{xv:.3}</text>"#, y0 + 16.0);
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{ytext}</text>"#, x0 - 4.0, py + 4.0);
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, H - 16.0, esc(x_label));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        H / 2.0,
        H / 2.0,
        esc(y_label)
    );
}

pub fn line_plot(plot: &Plot<'_>) -> String {
    let ty = |v: f64| if plot.log_y { v.max(1e-300).log10() } else { v };
    let xb = bounds(plot.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let yb = bounds(plot.series.iter().flat_map(|s| s.points.iter().map(|p| ty(p.1))));
    let (x0, x1, y0, y1) = (MARGIN, W - MARGIN / 2.0, H - MARGIN, MARGIN);
    let px = |v: f64| x0 + (v - xb.0) / (xb.1 - xb.0) * (x1 - x0);
    let py = |v: f64| y0 - (ty(v) - yb.0) / (yb.1 - yb.0) * (y0 - y1);

    let mut out = String::new();
    header(&mut out, plot.title);
    axes(&mut out, xb, yb, plot.x_label, plot.y_label, plot.log_y);
    for (i, s) in plot.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut d = String::new();
        let mut pen_up = true;
        for &(x, y) in &s.points {
            if !(x.is_finite() && y.is_finite()) {
                pen_up = true;
                continue;
            }
            let _ = write!(d, "{}{:.2},{:.2} ", if pen_up { "M" } else { "L" }, px(x), py(y));
            pen_up = false;
        }
        let _ = writeln!(out, r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1"/>"#, d.trim_end());
        if !s.label.is_empty() {
            let ly = y1 + 14.0 + 16.0 * i as f64;
            let _ = writeln!(out, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="2"/>"#, x1 - 110.0, ly - 4.0, x1 - 90.0, ly - 4.0);
            let _ = writeln!(out, r#"<text x="{}" y="{ly}">{}</text>"#, x1 - 86.0, esc(s.label));
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Row-major `values[iy * nx + ix]`; `None` cells are drawn grey.
pub fn heat_map(title: &str, xs: &[f64], ys: &[f64], values: &[Option<f64>]) -> String {
    let nx = xs.len();
    let (lo, hi) = bounds(values.iter().flatten().copied());
    let xb = bounds(xs.iter().copied());
    let yb = bounds(ys.iter().copied());
    let (x0, x1, y0, y1) = (MARGIN, W - MARGIN / 2.0, H - MARGIN, MARGIN);
    let cw = (x1 - x0) / nx.max(1) as f64;
    let ch = (y0 - y1) / ys.len().max(1) as f64;

    let mut out = String::new();
    header(&mut out, title);
    for (iy, _) in ys.iter().enumerate() {
        for ix in 0..nx {
            let fill = match values[iy * nx + ix] {
                None => "#888888".to_string(),
                Some(v) => {
                    let f = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
                    let r = (255.0 * f) as u8;
                    let b = (255.0 * (1.0 - f)) as u8;
                    format!("#{r:02x}40{b:02x}")
                }
            };
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                x0 + ix as f64 * cw,
                y0 - (iy + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    axes(&mut out, xb, yb, "x", "y", false);
    let _ = writeln!(out, r#"<text x="{}" y="{}">range [{lo:.3}, {hi:.3}]</text>"#, x0, y1 - 6.0);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_plot_is_wellformed() {
        let svg = line_plot(&Plot {
            title: "a < b",
            x_label: "t",
            y_label: "x",
            log_y: false,
            series: vec![Series { label: "s", points: vec![(0.0, 1.0), (1.0, f64::NAN), (2.0, 3.0)] }],
        });
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(svg.contains("M") && !svg.contains("NaN"));
    }

    #[test]
    fn heat_map_cells() {
        let svg = heat_map("q", &[0.0, 1.0], &[0.0, 1.0, 2.0], &[Some(1.0), None, Some(2.0), Some(3.0), Some(0.0), Some(1.0)]);
        assert_eq!(svg.matches("<rect").count(), 2 + 6);
        assert!(svg.contains("#888888"));
    }
}
