//! Log-log SVG of the permittivity plane.
//!
//! Output depends only on the inputs: material order, region order and the
//! fixed number formatting below.

use std::fmt::Write as _;

use permscreen_core::{MaterialDatabase, RegionSet, Semantics};

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 640.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 70.0;

/// Axis span in decades.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogAxes {
    pub real_decades: (i32, i32),
    pub loss_decades: (i32, i32),
}

impl Default for LogAxes {
    fn default() -> Self {
        LogAxes {
            real_decades: (0, 2),
            loss_decades: (-4, 2),
        }
    }
}

impl LogAxes {
    fn x(&self, real: f64) -> f64 {
        let (lo, hi) = (self.real_decades.0 as f64, self.real_decades.1 as f64);
        let t = (real.max(f64::MIN_POSITIVE).log10().clamp(lo, hi) - lo) / (hi - lo);
        LEFT + t * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, loss: f64) -> f64 {
        let (lo, hi) = (self.loss_decades.0 as f64, self.loss_decades.1 as f64);
        let t = (loss.max(f64::MIN_POSITIVE).log10().clamp(lo, hi) - lo) / (hi - lo);
        HEIGHT - BOTTOM - t * (HEIGHT - TOP - BOTTOM)
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

pub fn render_svg(db: &MaterialDatabase, regions: &RegionSet, locus: Option<&[[f64; 2]]>) -> String {
    let axes = LogAxes::default();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        s,
        r#"<title>Complex permittivity at {} GHz</title>"#,
        db.frequency_ghz()
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // grid and axes
    let (x0, x1) = (axes.x(10f64.powi(axes.real_decades.0)), axes.x(10f64.powi(axes.real_decades.1)));
    let (y0, y1) = (axes.y(10f64.powi(axes.loss_decades.0)), axes.y(10f64.powi(axes.loss_decades.1)));
    s.push_str("<g class=\"axes\" stroke=\"#444\" fill=\"none\">\n");
    let _ = writeln!(s, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}"/>"#);
    let _ = writeln!(s, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}"/>"#);
    for d in axes.real_decades.0..=axes.real_decades.1 {
        let x = axes.x(10f64.powi(d));
        let _ = writeln!(s, r##"<line class="tick" x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{y1:.2}" stroke="#ddd"/>"##);
    }
    for d in axes.loss_decades.0..=axes.loss_decades.1 {
        let y = axes.y(10f64.powi(d));
        let _ = writeln!(s, r##"<line class="tick" x1="{x0:.2}" y1="{y:.2}" x2="{x1:.2}" y2="{y:.2}" stroke="#ddd"/>"##);
    }
    s.push_str("</g>\n<g class=\"tick-labels\" fill=\"#222\">\n");
    for d in axes.real_decades.0..=axes.real_decades.1 {
        let x = axes.x(10f64.powi(d));
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{d}</text>"#, y0 + 16.0);
    }
    for d in axes.loss_decades.0..=axes.loss_decades.1 {
        let y = axes.y(10f64.powi(d));
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#, x0 - 6.0, y + 4.0);
    }
    let _ = writeln!(
        s,
        r#"<text class="axis-label" x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">ε′ (real part)</text>"#,
        0.5 * (x0 + x1),
        HEIGHT - 20.0
    );
    let _ = writeln!(
        s,
        r#"<text class="axis-label" x="20" y="{:.2}" text-anchor="middle" font-size="14" transform="rotate(-90 20 {:.2})">ε″ (loss)</text>"#,
        0.5 * (y0 + y1),
        0.5 * (y0 + y1)
    );
    s.push_str("</g>\n");

    s.push_str("<g class=\"regions\">\n");
    for r in regions.regions() {
        let (rmin, rmax) = r.real_bounds();
        let (lmin, lmax) = r.loss_bounds();
        let (left, right) = (axes.x(rmin), axes.x(rmax));
        let (top, bottom) = (axes.y(lmax), axes.y(lmin));
        let (class, color) = match r.semantics() {
            Semantics::Hazard => ("hazard", "#d62728"),
            Semantics::Safe => ("safe", "#2ca02c"),
        };
        let _ = writeln!(
            s,
            r#"<rect class="region {class}" data-name="{}" x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{color}" fill-opacity="0.12" stroke="{color}" stroke-width="2"/>"#,
            escape(r.name()),
            right - left,
            bottom - top
        );
    }
    s.push_str("</g>\n");

    if let Some(points) = locus {
        let coords: Vec<String> = points
            .iter()
            .map(|[re, im]| format!("{:.2},{:.2}", axes.x(*re), axes.y(*im)))
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline class="locus" points="{}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>"##,
            coords.join(" ")
        );
    }

    s.push_str("<g class=\"materials\">\n");
    for m in db.iter() {
        let (x, y) = (axes.x(m.permittivity.real()), axes.y(m.permittivity.loss()));
        let name = escape(&m.name);
        let _ = writeln!(
            s,
            r##"<g class="material" data-name="{name}"><circle class="point" cx="{x:.2}" cy="{y:.2}" r="3.5" fill="#333"/><text class="label" x="{:.2}" y="{:.2}">{name}</text></g>"##,
            x + 5.0,
            y - 4.0
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}
