//! Ranking evolution charts: position in the later interval against
//! position in the earlier one, with the identity line as reference.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};
use crate::ranking::Ranking;

/// One plotted node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecPoint {
    pub node_id: String,
    pub r_x: usize,
    pub r_y: usize,
    pub delta: i64,
    pub flagged: bool,
}

impl RecPoint {
    pub fn direction(&self) -> &'static str {
        match self.delta {
            d if d > 0 => "gained",
            d if d < 0 => "lost",
            _ => "none",
        }
    }
}

/// Points in node order; `flagged` holds the node indices of the outliers.
pub fn rec_points(x: &Ranking, y: &Ranking, flagged: &HashSet<usize>) -> Result<Vec<RecPoint>> {
    if x.nodes() != y.nodes() {
        return Err(Error::NodeSetMismatch);
    }
    Ok(x
        .positions()
        .iter()
        .zip(y.positions())
        .enumerate()
        .map(|(i, (&r_x, &r_y))| RecPoint {
            node_id: x.nodes().id(i).to_string(),
            r_x,
            r_y,
            delta: r_x as i64 - r_y as i64,
            flagged: flagged.contains(&i),
        })
        .collect())
}

/// `node,r_x,r_y,delta,flagged,direction`
pub fn write_rec_csv<W: Write>(points: &[RecPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "r_x", "r_y", "delta", "flagged", "direction"])?;
    for p in points {
        w.write_record([
            p.node_id.clone(),
            p.r_x.to_string(),
            p.r_y.to_string(),
            p.delta.to_string(),
            p.flagged.to_string(),
            p.direction().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
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

const SIZE: f64 = 640.0;
const MARGIN: f64 = 56.0;
const MIN_RADIUS: f64 = 2.0;
const MAX_RADIUS: f64 = 14.0;
const FLAGGED: &str = "#f5a04a";
const REGULAR: &str = "#9cc9e8";

/// A standalone SVG document. Marker area grows with `|delta|`; gainers
/// are drawn as upward triangles, losers as downward ones, unmoved nodes
/// as circles of the minimum size.
pub fn rec_svg(points: &[RecPoint], title: &str, x_label: &str, y_label: &str) -> String {
    let n = points.len().max(1) as f64;
    let plot = SIZE - 2.0 * MARGIN;
    let scale = |r: usize| (r as f64 - 1.0) / (n - 1.0).max(1.0) * plot;
    let px = |r: usize| MARGIN + scale(r);
    // position 1 at the top
    let py = |r: usize| MARGIN + scale(r);
    let max_abs = points.iter().map(|p| p.delta.unsigned_abs()).max().unwrap_or(0).max(1) as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>"#);
    let end = SIZE - MARGIN;
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{plot}" height="{plot}" fill="none" stroke="dimgray" stroke-width="1"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{MARGIN}" y1="{MARGIN}" x2="{end}" y2="{end}" stroke="gray" stroke-width="1" stroke-dasharray="4 3"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        SIZE / 2.0,
        SIZE - 16.0,
        escape(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        SIZE / 2.0,
        SIZE / 2.0,
        escape(y_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="30" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
        SIZE / 2.0,
        escape(title)
    );
    for (label, r) in [("1".to_string(), 1usize), (points.len().to_string(), points.len().max(1))] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="middle">{label}</text>"#,
            px(r),
            end + 14.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">{label}</text>"#,
            MARGIN - 6.0,
            py(r) + 3.0
        );
    }

    // regular points first so flagged markers stay on top
    let mut ordered: Vec<&RecPoint> = points.iter().collect();
    ordered.sort_by_key(|p| p.flagged);
    for p in ordered {
        let (cx, cy) = (px(p.r_x), py(p.r_y));
        let area_share = p.delta.unsigned_abs() as f64 / max_abs;
        let r = (MAX_RADIUS * area_share.sqrt()).max(MIN_RADIUS);
        let fill = if p.flagged { FLAGGED } else { REGULAR };
        let id = escape(&p.node_id);
        if p.delta == 0 {
            let _ = writeln!(
                s,
                r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{MIN_RADIUS}" fill="{fill}" stroke="black" stroke-width="0.5"><title>{id}</title></circle>"#
            );
        } else {
            let h = r * 1.5;
            let w = r * 1.732;
            let pts = if p.delta > 0 {
                format!("{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}", cx, cy - h * 2.0 / 3.0, cx - w / 2.0, cy + h / 3.0, cx + w / 2.0, cy + h / 3.0)
            } else {
                format!("{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}", cx, cy + h * 2.0 / 3.0, cx - w / 2.0, cy - h / 3.0, cx + w / 2.0, cy - h / 3.0)
            };
            let _ = writeln!(
                s,
                r#"<polygon points="{pts}" fill="{fill}" stroke="black" stroke-width="0.5"><title>{id} ({:+})</title></polygon>"#,
                p.delta
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
