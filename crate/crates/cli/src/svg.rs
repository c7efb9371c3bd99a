//! Minimal dependency-free SVG charts: axes, polylines, stems, scatter
//! points, stacked bars and horizontal bands.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 60.0;

#[derive(Clone, Debug)]
pub struct StackedBar {
    pub lo: f64,
    pub hi: f64,
    /// Segments from the bottom up.
    pub parts: Vec<(f64, &'static str)>,
}

#[derive(Clone, Debug, Default)]
pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub polylines: Vec<(Vec<(f64, f64)>, &'static str)>,
    pub stems: Vec<((f64, f64), &'static str)>,
    pub points: Vec<((f64, f64), &'static str)>,
    pub bars: Vec<StackedBar>,
    /// `(y_lo, y_hi, colour)` across the full width.
    pub bands: Vec<(f64, f64, &'static str)>,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn sx(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn sy(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace("--", "- -")
}

impl Chart {
    fn frame(&self) -> Frame {
        let mut xs: Vec<f64> = Vec::new();
        let mut ys: Vec<f64> = vec![];
        for (line, _) in &self.polylines {
            for &(x, y) in line {
                xs.push(x);
                ys.push(y);
            }
        }
        for &((x, y), _) in self.stems.iter().chain(&self.points) {
            xs.push(x);
            ys.push(y);
        }
        for bar in &self.bars {
            xs.extend([bar.lo, bar.hi]);
            ys.push(bar.parts.iter().map(|p| p.0).sum());
        }
        for &(lo, hi, _) in &self.bands {
            ys.extend([lo, hi]);
        }
        if !self.stems.is_empty() || !self.bars.is_empty() {
            ys.push(0.0);
        }
        let finite = |v: &[f64]| {
            let (lo, hi) = v
                .iter()
                .filter(|x| x.is_finite())
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
            if lo > hi {
                (0.0, 1.0)
            } else if lo == hi {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        };
        let (x0, x1) = finite(&xs);
        let (y0, y1) = finite(&ys);
        Frame { x0, x1, y0, y1 }
    }

    /// Renders the chart; `comment` is embedded verbatim (escaped) as an XML comment.
    pub fn render(&self, comment: &str) -> String {
        let f = self.frame();
        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(s, "<!-- {} -->", escape(comment));
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        for &(lo, hi, colour) in &self.bands {
            let (top, bottom) = (f.sy(hi), f.sy(lo));
            let _ = writeln!(
                s,
                r#"<rect x="{MARGIN}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{colour}" fill-opacity="0.15"/>"#,
                WIDTH - 2.0 * MARGIN,
                (bottom - top).max(0.5)
            );
        }
        for bar in &self.bars {
            let (left, right) = (f.sx(bar.lo), f.sx(bar.hi));
            let mut base = 0.0;
            for &(h, colour) in &bar.parts {
                let (top, bottom) = (f.sy(base + h), f.sy(base));
                let _ = writeln!(
                    s,
                    r#"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{colour}"/>"#,
                    (right - left).max(0.5),
                    bottom - top
                );
                base += h;
            }
        }
        for &((x, y), colour) in &self.stems {
            let _ = writeln!(
                s,
                r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="{colour}"/>"#,
                f.sx(x),
                f.sy(0.0),
                f.sy(y)
            );
        }
        for (line, colour) in &self.polylines {
            let pts: Vec<String> = line
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", f.sx(x), f.sy(y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1"/>"#,
                pts.join(" ")
            );
        }
        for &((x, y), colour) in &self.points {
            let _ =
                writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="1.5" fill="{colour}"/>"#, f.sx(x), f.sy(y));
        }
        let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
        let _ = writeln!(
            s,
            r#"<path d="M{left},{top} L{left},{bottom} L{right},{bottom}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(s, r#"<text x="{left}" y="{}">{:.4}</text>"#, bottom + 16.0, f.x0);
        let _ =
            writeln!(s, r#"<text x="{right}" y="{}" text-anchor="end">{:.4}</text>"#, bottom + 16.0, f.x1);
        let _ = writeln!(s, r#"<text x="{}" y="{bottom}" text-anchor="end">{:.4}</text>"#, left - 4.0, f.y0);
        let _ =
            writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{:.4}</text>"#, left - 4.0, top + 4.0, f.y1);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            bottom + 36.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            top - 20.0,
            escape(&self.title)
        );
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_every_element() {
        let chart = Chart {
            title: "t <1>".into(),
            x_label: "k".into(),
            y_label: "y".into(),
            polylines: vec![(vec![(0.0, 0.0), (1.0, 2.0)], "black")],
            stems: vec![((0.5, 1.0), "red")],
            points: vec![((0.2, 0.3), "blue")],
            bars: vec![StackedBar { lo: 0.0, hi: 0.1, parts: vec![(1.0, "red"), (2.0, "blue")] }],
            bands: vec![(-1.0, 1.0, "green")],
        };
        let s = chart.render("hash -- x");
        assert!(s.starts_with("<?xml"));
        assert!(s.contains("<!-- hash - - x -->"));
        for tag in ["<polyline", "<line", "<circle", "<rect", "t &lt;1&gt;"] {
            assert!(s.contains(tag), "{tag}");
        }
        assert!(s.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn empty_chart_is_valid() {
        let s = Chart::default().render("");
        assert!(s.contains("</svg>") && !s.contains("NaN"));
    }
}
