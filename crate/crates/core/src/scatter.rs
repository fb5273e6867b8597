//! K versus h scatter data, as a delimited table or an SVG figure.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::ranking::AuthorIndices;

pub const SCATTER_HEADER: &str = "author_id,h,k,group";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScatterGroup {
    Cohort,
    Highlight,
}

impl ScatterGroup {
    pub fn as_str(self) -> &'static str {
        match self {
            ScatterGroup::Cohort => "cohort",
            ScatterGroup::Highlight => "highlight",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScatterRow {
    pub author_id: String,
    pub h: u64,
    pub k: u64,
    pub group: ScatterGroup,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ScatterTable {
    pub rows: Vec<ScatterRow>,
}

/// One row per author, sorted by author id. Authors in `highlight` are
/// marked as such; highlight ids absent from `reports` are ignored.
pub fn scatter_export<T: AuthorIndices>(reports: &[T], highlight: &BTreeSet<String>) -> ScatterTable {
    let mut rows: Vec<ScatterRow> = reports
        .iter()
        .map(|r| ScatterRow {
            author_id: r.author_id().to_string(),
            h: r.h(),
            k: r.k(),
            group: if highlight.contains(r.author_id()) {
                ScatterGroup::Highlight
            } else {
                ScatterGroup::Cohort
            },
        })
        .collect();
    rows.sort_by(|a, b| a.author_id.cmp(&b.author_id));
    ScatterTable { rows }
}

impl ScatterTable {
    pub fn highlighted(&self) -> impl Iterator<Item = &ScatterRow> {
        self.rows.iter().filter(|r| r.group == ScatterGroup::Highlight)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * (self.rows.len() + 1));
        out.push_str(SCATTER_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", csv_field(&r.author_id), r.h, r.k, r.group.as_str());
        }
        out
    }

    /// h on the horizontal axis, K on the vertical. Cohort points are blue
    /// circles and highlighted points red squares.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 480.0;
        const MARGIN: f64 = 60.0;
        let max_h = self.rows.iter().map(|r| r.h).max().unwrap_or(0).max(1);
        let max_k = self.rows.iter().map(|r| r.k).max().unwrap_or(0).max(1);
        let (h_top, h_step) = nice_axis(max_h);
        let (k_top, k_step) = nice_axis(max_k);
        let x = |h: u64| MARGIN + (h as f64 / h_top as f64) * (W - 2.0 * MARGIN);
        let y = |k: u64| H - MARGIN - (k as f64 / k_top as f64) * (H - 2.0 * MARGIN);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let (x0, y0, x1, y1) = (x(0), y(0), x(h_top), y(k_top));
        let _ = writeln!(
            s,
            r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" stroke="black" fill="none"/>"#
        );
        let mut t = 0;
        while t <= h_top {
            let _ = writeln!(
                s,
                r#"<line x1="{xt}" y1="{y0}" x2="{xt}" y2="{yt}" stroke="black"/><text x="{xt}" y="{yl}" text-anchor="middle">{t}</text>"#,
                xt = x(t),
                yt = y0 + 4.0,
                yl = y0 + 18.0
            );
            t += h_step;
        }
        let mut t = 0;
        while t <= k_top {
            let _ = writeln!(
                s,
                r#"<line x1="{x0}" y1="{yt}" x2="{xl}" y2="{yt}" stroke="black"/><text x="{xa}" y="{yb}" text-anchor="end">{t}</text>"#,
                yt = y(t),
                xl = x0 - 4.0,
                xa = x0 - 8.0,
                yb = y(t) + 4.0
            );
            t += k_step;
        }
        let _ = writeln!(
            s,
            r#"<text x="{cx}" y="{by}" text-anchor="middle">h</text><text x="{lx}" y="{cy}" text-anchor="middle" transform="rotate(-90 {lx} {cy})">K</text>"#,
            cx = W / 2.0,
            by = H - 15.0,
            lx = 18.0,
            cy = H / 2.0
        );
        for r in self.rows.iter().filter(|r| r.group == ScatterGroup::Cohort) {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="none" stroke="blue"><title>{}</title></circle>"#,
                x(r.h),
                y(r.k),
                xml_escape(&r.author_id)
            );
        }
        for r in self.highlighted() {
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="8" height="8" fill="red"><title>{}</title></rect>"#,
                x(r.h) - 4.0,
                y(r.k) - 4.0,
                xml_escape(&r.author_id)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Axis upper bound and tick step covering `max` with roughly five ticks.
fn nice_axis(max: u64) -> (u64, u64) {
    let raw = (max as f64 / 5.0).max(1.0);
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag) as u64;
    let step = step.max(1);
    (max.div_ceil(step) * step, step)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
