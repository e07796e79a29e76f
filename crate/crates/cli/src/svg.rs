//! Minimal deterministic SVG charts: line, scatter and horizontal bars.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 52.0;
const TICKS: usize = 5;

pub const BLUE: &str = "#1f4e9e";
pub const RED: &str = "#c0392b";
pub const GREY: &str = "#8c8c8c";

pub struct Series<'a> {
    pub name: &'a str,
    pub colour: &'a str,
    pub points: Vec<(f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn fmt(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn tick_label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".into()
        } else {
            s.into()
        }
    }
}

#[derive(Clone, Copy)]
struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn of(values: impl Iterator<Item = f64>) -> Self {
        let (lo, hi) = values
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
        if !lo.is_finite() {
            return Range { lo: 0.0, hi: 1.0 };
        }
        if lo == hi {
            let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
            return Range { lo: lo - pad, hi: hi + pad };
        }
        let pad = (hi - lo) * 0.05;
        Range { lo: lo - pad, hi: hi + pad }
    }

    fn including_zero(self) -> Self {
        Range {
            lo: self.lo.min(0.0),
            hi: self.hi,
        }
    }

    fn map(self, v: f64, a: f64, b: f64) -> f64 {
        a + (v - self.lo) / (self.hi - self.lo) * (b - a)
    }
}

struct Frame {
    x: Range,
    y: Range,
}

impl Frame {
    fn px(&self, v: f64) -> f64 {
        self.x.map(v, MARGIN_LEFT, WIDTH - MARGIN_RIGHT)
    }

    fn py(&self, v: f64) -> f64 {
        self.y.map(v, HEIGHT - MARGIN_BOTTOM, MARGIN_TOP)
    }
}

fn open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        fmt(WIDTH / 2.0),
        escape(title)
    );
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str, show_ticks: bool) {
    let (x0, x1) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let (y0, y1) = (HEIGHT - MARGIN_BOTTOM, MARGIN_TOP);
    let _ = writeln!(
        out,
        r#"<path d="M{} {} V{} H{}" fill="none" stroke="black"/>"#,
        fmt(x0),
        fmt(y1),
        fmt(y0),
        fmt(x1)
    );
    if show_ticks {
        for i in 0..=TICKS {
            let t = i as f64 / TICKS as f64;
            let xv = f.x.lo + t * (f.x.hi - f.x.lo);
            let yv = f.y.lo + t * (f.y.hi - f.y.lo);
            let (px, py) = (f.px(xv), f.py(yv));
            let _ = writeln!(
                out,
                r#"<line x1="{px}" y1="{y0}" x2="{px}" y2="{y0t}" stroke="black"/><text x="{px}" y="{yl}" text-anchor="middle">{lab}</text>"#,
                px = fmt(px),
                y0 = fmt(y0),
                y0t = fmt(y0 + 5.0),
                yl = fmt(y0 + 18.0),
                lab = tick_label(xv)
            );
            let _ = writeln!(
                out,
                r#"<line x1="{x0}" y1="{py}" x2="{x0t}" y2="{py}" stroke="black"/><text x="{xl}" y="{pyl}" text-anchor="end">{lab}</text>"#,
                x0 = fmt(x0),
                x0t = fmt(x0 - 5.0),
                py = fmt(py),
                xl = fmt(x0 - 8.0),
                pyl = fmt(py + 4.0),
                lab = tick_label(yv)
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        fmt((x0 + x1) / 2.0),
        fmt(HEIGHT - 12.0),
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{y}" text-anchor="middle" transform="rotate(-90 16 {y})">{}</text>"#,
        escape(y_label),
        y = fmt((y0 + y1) / 2.0)
    );
}

fn legend(out: &mut String, entries: &[(&str, &str)]) {
    for (i, (name, colour)) in entries.iter().enumerate() {
        let y = MARGIN_TOP + 10.0 + 20.0 * i as f64;
        let x = WIDTH - MARGIN_RIGHT + 16.0;
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="12" height="12" fill="{colour}"/><text x="{}" y="{}">{}</text>"#,
            fmt(x),
            fmt(y - 10.0),
            fmt(x + 18.0),
            fmt(y),
            escape(name)
        );
    }
}

/// Polyline chart, one line per series.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let all = || series.iter().flat_map(|s| s.points.iter());
    let frame = Frame {
        x: Range::of(all().map(|p| p.0)),
        y: Range::of(all().map(|p| p.1)).including_zero(),
    };
    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, &frame, x_label, y_label, true);
    for s in series {
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{},{}", fmt(frame.px(x)), fmt(frame.py(y))))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            pts.join(" "),
            s.colour
        );
    }
    let entries: Vec<(&str, &str)> = series.iter().map(|s| (s.name, s.colour)).collect();
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}

/// Scatter plot without tick labels (embedding axes carry no units).
pub fn scatter_chart(title: &str, series: &[Series]) -> String {
    let all = || series.iter().flat_map(|s| s.points.iter());
    let frame = Frame {
        x: Range::of(all().map(|p| p.0)),
        y: Range::of(all().map(|p| p.1)),
    };
    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, &frame, "", "", false);
    for s in series {
        for &(x, y) in s.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
            let _ = writeln!(
                out,
                r#"<circle cx="{}" cy="{}" r="3" fill="{}" fill-opacity="0.8"/>"#,
                fmt(frame.px(x)),
                fmt(frame.py(y)),
                s.colour
            );
        }
    }
    let entries: Vec<(&str, &str)> = series.iter().map(|s| (s.name, s.colour)).collect();
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}

/// Horizontal bars from a shared zero line, negative values to the left.
pub fn bar_chart(title: &str, value_label: &str, bars: &[(String, f64)], positive: &str, negative: &str) -> String {
    let frame = Frame {
        x: Range::of(bars.iter().map(|b| b.1).chain([0.0])),
        y: Range {
            lo: 0.0,
            hi: bars.len().max(1) as f64,
        },
    };
    let mut out = String::new();
    open(&mut out, title);
    axes(&mut out, &frame, value_label, "", false);
    let band = (HEIGHT - MARGIN_BOTTOM - MARGIN_TOP) / bars.len().max(1) as f64;
    let zero = frame.px(0.0);
    for (i, (label, v)) in bars.iter().enumerate() {
        let top = MARGIN_TOP + band * i as f64 + band * 0.15;
        let end = frame.px(*v);
        let _ = writeln!(
            out,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{}"/><text x="{}" y="{}">{}</text>"#,
            fmt(zero.min(end)),
            fmt(top),
            fmt((end - zero).abs()),
            fmt(band * 0.7),
            if *v >= 0.0 { positive } else { negative },
            fmt(WIDTH - MARGIN_RIGHT + 8.0),
            fmt(top + band * 0.5),
            escape(&format!("{label} ({})", tick_label(*v)))
        );
    }
    let _ = writeln!(
        out,
        r#"<line x1="{z}" y1="{}" x2="{z}" y2="{}" stroke="black"/>"#,
        fmt(MARGIN_TOP),
        fmt(HEIGHT - MARGIN_BOTTOM),
        z = fmt(zero)
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden(name: &str, actual: &str) {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
        if std::env::var_os("UPDATE_GOLDEN").is_some() {
            std::fs::write(&path, actual).unwrap();
        }
        let expected = std::fs::read_to_string(&path).unwrap();
        assert_eq!(actual, expected, "golden file {name} differs (UPDATE_GOLDEN=1 regenerates)");
    }

    #[test]
    fn line_chart_golden() {
        let svg = line_chart(
            "Distance <sweep>",
            "K",
            "distance",
            &[
                Series { name: "baseline", colour: GREY, points: vec![(2.0, 0.1), (3.0, 0.05), (4.0, 0.08)] },
                Series { name: "dist", colour: RED, points: vec![(2.0, 0.4), (3.0, 0.5), (4.0, 0.45)] },
            ],
        );
        golden("line.svg", &svg);
    }

    #[test]
    fn scatter_golden() {
        let svg = scatter_chart(
            "Embedding",
            &[
                Series { name: "A", colour: BLUE, points: vec![(-1.0, 0.5), (-1.2, 0.4)] },
                Series { name: "B", colour: RED, points: vec![(2.0, -0.5)] },
            ],
        );
        golden("scatter.svg", &svg);
    }

    #[test]
    fn bars_golden() {
        let bars = vec![("good".to_string(), 1.4), ("bad".to_string(), -0.6)];
        golden("bars.svg", &bar_chart("Contributions", "frequency x score", &bars, BLUE, RED));
    }

    #[test]
    fn degenerate_inputs_stay_finite() {
        let svg = line_chart("t", "x", "y", &[Series { name: "s", colour: RED, points: vec![(1.0, 1.0)] }]);
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
        let svg = scatter_chart("t", &[]);
        assert!(svg.ends_with("</svg>\n"));
    }
}
