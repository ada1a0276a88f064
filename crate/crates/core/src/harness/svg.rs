//! Minimal line charts: axes with ticks, one polyline per series, optional
//! vertical markers and a legend.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Vertical line at `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub x: f64,
    pub color: &'static str,
    pub dashed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub markers: Vec<Marker>,
    /// Extra legend entries for marker groups: (label, color, dashed).
    pub marker_legend: Vec<(String, &'static str, bool)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Round step giving about five ticks over `[lo, hi]`.
fn tick_step(lo: f64, hi: f64) -> f64 {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 { 1.0 } else if norm < 3.5 { 2.0 } else if norm < 7.5 { 5.0 } else { 10.0 };
    nice * mag
}

impl LineChart {
    pub fn render(&self) -> String {
        let (x0, x1) = span(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).chain(self.markers.iter().map(|m| m.x)));
        let (mut y0, y1) = span(self.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
        if y0 > 0.0 && y0 < 0.25 * y1 {
            y0 = 0.0;
        }
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

        let mut out = String::new();
        let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#);
        let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, LEFT + pw / 2.0, escape(&self.title));

        // Axes and ticks.
        let _ = writeln!(out, r#"<path d="M{LEFT},{TOP} V{} H{}" fill="none" stroke="black"/>"#, TOP + ph, LEFT + pw);
        for (lo, hi, horizontal) in [(x0, x1, true), (y0, y1, false)] {
            let step = tick_step(lo, hi);
            let mut t = (lo / step).ceil() * step;
            while t <= hi + step * 1e-9 {
                let label = format!("{}", (t / step).round() * step);
                let label = if label.len() > 8 { format!("{t:.3e}") } else { label };
                if horizontal {
                    let x = sx(t);
                    let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{label}</text>"#, TOP + ph, TOP + ph + 5.0, TOP + ph + 19.0);
                } else {
                    let y = sy(t);
                    let _ = writeln!(out, r#"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{label}</text>"#, LEFT - 5.0, LEFT - 8.0, y + 4.0);
                }
                t += step;
            }
        }
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, HEIGHT - 12.0, escape(&self.x_label));
        let _ = writeln!(out, r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#, TOP + ph / 2.0, TOP + ph / 2.0, escape(&self.y_label));

        for m in &self.markers {
            let x = sx(m.x);
            let dash = if m.dashed { r#" stroke-dasharray="4 3""# } else { "" };
            let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{}" stroke="{}"{dash}/>"#, TOP + ph, m.color);
        }

        for (i, s) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<String> = s
                .points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, pts.join(" "));
        }

        // Legend.
        let lx = LEFT + pw + 15.0;
        let entries = self
            .series
            .iter()
            .enumerate()
            .map(|(i, s)| (s.label.as_str(), PALETTE[i % PALETTE.len()], false))
            .chain(self.marker_legend.iter().map(|(l, c, d)| (l.as_str(), *c, *d)));
        for (i, (label, color, dashed)) in entries.enumerate() {
            let y = TOP + 10.0 + 18.0 * i as f64;
            let dash = if dashed { r#" stroke-dasharray="4 3""# } else { "" };
            let _ = writeln!(out, r#"<line x1="{lx}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"{dash}/><text x="{}" y="{}">{}</text>"#, lx + 22.0, lx + 28.0, y + 4.0, escape(label));
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_one_polyline_per_series() {
        let chart = LineChart {
            title: "a < b".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![
                Series { label: "one".into(), points: vec![(0.0, 1.0), (1.0, 2.0)] },
                Series { label: "two".into(), points: vec![(0.0, 3.0), (1.0, f64::NAN)] },
            ],
            markers: vec![Marker { x: 0.5, color: "#777", dashed: true }],
            marker_legend: vec![("edge".into(), "#777", true)],
        };
        let svg = chart.render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a &lt; b"));
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn nice_ticks() {
        assert_eq!(tick_step(0.0, 0.5), 0.1);
        assert_eq!(tick_step(1000.0, 2000.0), 200.0);
    }
}
