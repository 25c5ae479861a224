//! Minimal scatter and line plots written as standalone SVG.

use std::fmt::Write;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 540.0;
const MARGIN: (f64, f64, f64, f64) = (70.0, 180.0, 40.0, 60.0); // left, right, top, bottom

#[derive(Clone, Copy, Debug)]
pub enum Mark {
    Dots(f64),
    Line(f64),
}

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub mark: Mark,
    /// Polylines for `Mark::Line`; a single group of points for dots.
    pub groups: Vec<Vec<(f64, f64)>>,
}

impl Series {
    pub fn dots(label: impl Into<String>, color: &'static str, radius: f64, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            color,
            mark: Mark::Dots(radius),
            groups: vec![points],
        }
    }

    pub fn lines(label: impl Into<String>, color: &'static str, width: f64, groups: Vec<Vec<(f64, f64)>>) -> Self {
        Self {
            label: label.into(),
            color,
            mark: Mark::Line(width),
            groups,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in series.iter().flat_map(|s| s.groups.iter().flatten()) {
        if x.is_finite() && y.is_finite() {
            b = (b.0.min(x), b.1.max(x), b.2.min(y), b.3.max(y));
        }
    }
    if !b.0.is_finite() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    let pad = |lo: f64, hi: f64| {
        let d = if hi > lo {
            0.04 * (hi - lo)
        } else {
            0.5_f64.max(0.04 * lo.abs())
        };
        (lo - d, hi + d)
    };
    let (x0, x1) = pad(b.0, b.1);
    let (y0, y1) = pad(b.2, b.3);
    (x0, x1, y0, y1)
}

/// Round tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|f| f * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(x: f64) -> String {
    let s = format!("{:.6}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    pub fn render(&self) -> String {
        let (x0, x1, y0, y1) = bounds(&self.series);
        let (ml, mr, mt, mb) = MARGIN;
        let (pw, ph) = (WIDTH - ml - mr, HEIGHT - mt - mb);
        let px = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
        let py = |y: f64| mt + (y1 - y) / (y1 - y0) * ph;

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r##"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>"##
        );
        for t in ticks(x0, x1) {
            let x = px(t);
            let _ = writeln!(
                out,
                r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#444"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
                mt + ph,
                mt + ph + 5.0,
                mt + ph + 18.0,
                tick_label(t)
            );
        }
        for t in ticks(y0, y1) {
            let y = py(t);
            let _ = writeln!(
                out,
                r##"<line x1="{:.2}" y1="{y:.2}" x2="{ml}" y2="{y:.2}" stroke="#444"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
                ml - 5.0,
                ml - 8.0,
                y + 4.0,
                tick_label(t)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            ml + pw / 2.0,
            HEIGHT - 15.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
            mt + ph / 2.0,
            mt + ph / 2.0,
            escape(&self.y_label)
        );

        for s in &self.series {
            match s.mark {
                Mark::Dots(r) => {
                    for &(x, y) in s.groups.iter().flatten() {
                        let _ = writeln!(
                            out,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{}"/>"#,
                            px(x),
                            py(y),
                            s.color
                        );
                    }
                }
                Mark::Line(w) => {
                    for group in &s.groups {
                        let pts: Vec<String> = group
                            .iter()
                            .filter(|(x, y)| x.is_finite() && y.is_finite())
                            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                            .collect();
                        if pts.len() > 1 {
                            let _ = writeln!(
                                out,
                                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="{w}"/>"#,
                                pts.join(" "),
                                s.color
                            );
                        }
                    }
                }
            }
        }

        // legend, right of the frame
        for (i, s) in self.series.iter().enumerate() {
            let y = mt + 16.0 + 16.0 * i as f64;
            let x = ml + pw + 12.0;
            let _ = match s.mark {
                Mark::Dots(_) => writeln!(
                    out,
                    r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{}"/>"#,
                    x + 8.0,
                    y - 4.0,
                    s.color
                ),
                Mark::Line(_) => writeln!(
                    out,
                    r#"<line x1="{x:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{}" stroke-width="2"/>"#,
                    y - 4.0,
                    x + 16.0,
                    y - 4.0,
                    s.color
                ),
            };
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{y:.1}">{}</text>"#,
                x + 22.0,
                escape(&s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round() {
        assert_eq!(ticks(0.0, 10.0), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        assert!(ticks(-0.3, 0.3).contains(&0.0));
    }

    #[test]
    fn renders_every_point() {
        let plot = Plot {
            title: "t <1>".into(),
            series: vec![
                Series::dots("pts", "black", 2.0, vec![(0.0, 0.0), (1.0, 1.0)]),
                Series::lines("curve", "red", 1.0, vec![vec![(0.0, 1.0), (1.0, 0.0)]]),
            ],
            ..Plot::default()
        };
        let svg = plot.render();
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("t &lt;1&gt;"));
        assert_eq!(svg, plot.render());
    }
}
