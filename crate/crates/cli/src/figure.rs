//! SVG scatter of certified bounds against the exact gap.

use std::fmt::Write;

use crate::scan::ScanRow;

pub const SIZE: f64 = 640.0;
/// Data range `[0, RANGE]` on both axes.
pub const RANGE: f64 = 0.55;
const MARGIN: f64 = 60.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Series {
    /// `lambda_-(v, q)`, blue dots.
    LowerQ,
    /// `lambda_-(v)`, yellow triangles.
    Lower,
    /// `lambda_+(v)`, green squares.
    Upper,
}

impl Series {
    pub const ALL: [Series; 3] = [Series::LowerQ, Series::Lower, Series::Upper];

    pub fn class(self) -> &'static str {
        match self {
            Series::LowerQ => "lambda-minus-q",
            Series::Lower => "lambda-minus",
            Series::Upper => "lambda-plus",
        }
    }

    fn label(self) -> &'static str {
        match self {
            Series::LowerQ => "(λ₋(v,q), gap(v))",
            Series::Lower => "(λ₋(v), gap(v))",
            Series::Upper => "(λ₊(v), gap(v))",
        }
    }

    fn color(self) -> &'static str {
        match self {
            Series::LowerQ => "#1f77b4",
            Series::Lower => "#e6b800",
            Series::Upper => "#2ca02c",
        }
    }

    /// The x coordinate of a row, when that bound is certified.
    pub fn value(self, row: &ScanRow) -> Option<f64> {
        let (status, value) = match self {
            Series::LowerQ => (&row.status_minus_q, row.lambda_minus_q_cert),
            Series::Lower => (&row.status_minus, row.lambda_minus_cert),
            Series::Upper => (&row.status_plus, row.lambda_plus_cert),
        };
        value.filter(|_| status == "certified")
    }

    fn marker(self, out: &mut String, x: f64, y: f64) {
        let (c, cls) = (self.color(), self.class());
        let _ = match self {
            Series::LowerQ => {
                writeln!(out, r#"<circle class="marker {cls}" cx="{x:.2}" cy="{y:.2}" r="3" fill="{c}"/>"#)
            }
            Series::Lower => writeln!(
                out,
                r#"<polygon class="marker {cls}" points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{c}"/>"#,
                x,
                y - 4.0,
                x - 3.5,
                y + 2.5,
                x + 3.5,
                y + 2.5
            ),
            Series::Upper => writeln!(
                out,
                r#"<rect class="marker {cls}" x="{:.2}" y="{:.2}" width="6" height="6" fill="none" stroke="{c}"/>"#,
                x - 3.0,
                y - 3.0
            ),
        };
    }
}

fn px(v: f64) -> f64 {
    MARGIN + v / RANGE * (SIZE - 2.0 * MARGIN)
}

fn py(v: f64) -> f64 {
    SIZE - px(v)
}

/// Points outside the plotted range are clamped to its border.
fn clamp(v: f64) -> f64 {
    v.clamp(0.0, RANGE)
}

pub fn render(rows: &[ScanRow], vline: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let (lo, hi) = (px(0.0), px(RANGE));
    let _ = writeln!(s, r#"<g class="axes" stroke="black" fill="none">"#);
    let _ = writeln!(s, r#"<rect x="{lo}" y="{}" width="{}" height="{}"/>"#, py(RANGE), hi - lo, hi - lo);
    for i in 0..=11 {
        let t = 0.05 * i as f64;
        let _ = writeln!(s, r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}"/>"#, px(t), py(0.0), py(0.0) + 5.0);
        let _ = writeln!(s, r#"<line x1="{1:.2}" y1="{0:.2}" x2="{2:.2}" y2="{0:.2}"/>"#, py(t), px(0.0) - 5.0, px(0.0));
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g class="tick-labels" fill="black">"#);
    for i in (0..=11).step_by(2) {
        let t = 0.05 * i as f64;
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{t:.1}</text>"#, px(t), py(0.0) + 18.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{t:.1}</text>"#, px(0.0) - 8.0, py(t) + 4.0);
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text class="axis-label" x="{:.2}" y="{:.2}" text-anchor="middle">certified bound</text>"#,
        (lo + hi) / 2.0,
        SIZE - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text class="axis-label" x="15" y="{:.2}" text-anchor="middle" transform="rotate(-90 15 {:.2})">gap(v)</text>"#,
        SIZE / 2.0,
        SIZE / 2.0
    );
    let _ = writeln!(
        s,
        r#"<line class="diagonal" x1="{lo}" y1="{}" x2="{hi}" y2="{}" stroke="{}" stroke-width="1.5"/>"#,
        py(0.0),
        py(RANGE),
        Series::LowerQ.color()
    );
    let xv = px(clamp(vline));
    let _ = writeln!(
        s,
        r#"<line class="vline" x1="{xv:.2}" y1="{}" x2="{xv:.2}" y2="{}" stroke="gray" stroke-width="1.5"/>"#,
        py(0.0),
        py(RANGE)
    );

    for series in Series::ALL {
        let _ = writeln!(s, r#"<g class="series {}">"#, series.class());
        for row in rows {
            if let Some(x) = series.value(row) {
                let y = row.gap().to_f64();
                series.marker(&mut s, px(clamp(x)), py(clamp(y)));
            }
        }
        let _ = writeln!(s, "</g>");
    }

    let _ = writeln!(s, r#"<g class="legend">"#);
    for (i, series) in Series::ALL.into_iter().enumerate() {
        let (x, y) = (lo + 12.0, py(RANGE) + 18.0 + 18.0 * i as f64);
        let mut m = String::new();
        series.marker(&mut m, x, y);
        s.push_str(&m.replace("class=\"marker ", "class=\"legend-key "));
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, x + 10.0, y + 4.0, series.label());
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

/// Marker count per series.
pub fn marker_counts(svg: &str) -> [usize; 3] {
    Series::ALL.map(|series| svg.matches(&format!("class=\"marker {}\"", series.class())).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_has_axes_and_no_markers() {
        let svg = render(&[], 1.0 / 6.0);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains(r#"viewBox="0 0 640 640""#));
        assert!(svg.contains("class=\"diagonal\"") && svg.contains("class=\"vline\""));
        assert_eq!(marker_counts(&svg), [0, 0, 0]);
    }

    #[test]
    fn mapping_corners() {
        assert_eq!(px(0.0), MARGIN);
        assert_eq!(px(RANGE), SIZE - MARGIN);
        assert_eq!(py(RANGE), MARGIN);
    }
}
