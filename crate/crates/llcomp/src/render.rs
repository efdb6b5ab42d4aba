//! SVG figures of a certification report: the sampled triangles with their
//! maximal sides, the comparison triangle of the worst (or first) triangle,
//! and the witness pairs colored by the sign of their defect.

use std::fmt::Write;

use llcomp_core::certify::Witness;
use llcomp_core::models::{ModelParams, Side};
use llcomp_core::spaces::{load_instance, EventPoint, PreLengthSpace, SpaceInstance};

use crate::report::ReportDocument;

const PANEL: f64 = 400.0;
const MARGIN: f64 = 30.0;
const NEGATIVE: &str = "#c0392b";
const POSITIVE: &str = "#2471a3";
const MAX_WITNESS_TRIANGLES: usize = 8;

/// Affine map from a chart box into one panel, with time pointing up.
struct Panel {
    left: f64,
    x0: f64,
    t0: f64,
    scale: f64,
}

impl Panel {
    fn fit(left: f64, points: &[EventPoint]) -> Panel {
        let (mut x0, mut x1, mut t0, mut t1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in points.iter().filter(|p| p.is_finite()) {
            x0 = x0.min(p.x);
            x1 = x1.max(p.x);
            t0 = t0.min(p.t);
            t1 = t1.max(p.t);
        }
        if !(x0 <= x1 && t0 <= t1) {
            (x0, x1, t0, t1) = (-1.0, 1.0, 0.0, 2.0);
        }
        let span = (x1 - x0).max(t1 - t0).max(1e-9);
        let inner = PANEL - 2.0 * MARGIN;
        // Center the box inside the square panel.
        let cx = 0.5 * (x0 + x1) - 0.5 * span;
        let ct = 0.5 * (t0 + t1) - 0.5 * span;
        Panel { left, x0: cx, t0: ct, scale: inner / span }
    }

    fn map(&self, p: &EventPoint) -> (f64, f64) {
        (
            self.left + MARGIN + (p.x - self.x0) * self.scale,
            PANEL - MARGIN - (p.t - self.t0) * self.scale,
        )
    }

    fn polyline(&self, svg: &mut String, pts: &[EventPoint], style: &str, closed: bool) {
        let mut coords: Vec<String> = pts
            .iter()
            .map(|p| {
                let (u, v) = self.map(p);
                format!("{u:.3},{v:.3}")
            })
            .collect();
        if closed {
            if let Some(first) = coords.first().cloned() {
                coords.push(first);
            }
        }
        let _ = writeln!(svg, r#"  <polyline points="{}" fill="none" {style}/>"#, coords.join(" "));
    }

    fn marker(&self, svg: &mut String, p: &EventPoint, color: &str, class: &str) {
        let (u, v) = self.map(p);
        let _ = writeln!(svg, r#"  <circle class="{class}" cx="{u:.3}" cy="{v:.3}" r="4" fill="{color}"/>"#);
    }

    fn segment(&self, svg: &mut String, p: &EventPoint, q: &EventPoint, color: &str) {
        let (u1, v1) = self.map(p);
        let (u2, v2) = self.map(q);
        let _ = writeln!(
            svg,
            r#"  <line x1="{u1:.3}" y1="{v1:.3}" x2="{u2:.3}" y2="{v2:.3}" stroke="{color}" stroke-dasharray="4 3"/>"#
        );
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// The chart polyline of each side, or the straight segment when the space
/// cannot be rebuilt.
fn side_polylines(space: Option<&SpaceInstance>, v: &[EventPoint; 3], variant: llcomp_core::spaces::MaximizerVariant) -> Vec<Vec<EventPoint>> {
    let ends = [(v[0], v[1]), (v[1], v[2]), (v[0], v[2])];
    ends.iter()
        .map(|(p, q)| {
            space
                .and_then(|s| s.maximizer(p, q, variant).ok())
                .map(|c| c.vertices().to_vec())
                .unwrap_or_else(|| vec![*p, *q])
        })
        .collect()
}

fn color(defect: f64) -> (&'static str, &'static str) {
    if defect < 0.0 {
        (NEGATIVE, "defect-negative")
    } else {
        (POSITIVE, "defect-positive")
    }
}

/// Renders a report as a standalone SVG 1.1 document.
pub fn render_report(doc: &ReportDocument) -> String {
    let space = load_instance(&doc.space).ok();
    let variant = doc.config.variant;

    // Instance triangles: echoed samples in grey, witness triangles in black.
    let mut witness_tris: Vec<&Witness> = Vec::new();
    for w in &doc.verdict.witnesses {
        if witness_tris.len() < MAX_WITNESS_TRIANGLES && !witness_tris.iter().any(|o| o.triangle_id == w.triangle_id) {
            witness_tris.push(w);
        }
    }
    let mut instance_sides: Vec<(Vec<Vec<EventPoint>>, bool)> = doc
        .triangles
        .iter()
        .map(|t| (side_polylines(space.as_ref(), t, variant), false))
        .collect();
    instance_sides.extend(witness_tris.iter().map(|w| (side_polylines(space.as_ref(), &w.vertices, variant), true)));
    let all_instance: Vec<EventPoint> = instance_sides.iter().flat_map(|(s, _)| s.iter().flatten().copied()).collect();
    let left = Panel::fit(0.0, &all_instance);

    // Comparison triangle of the worst witness, else of the first triangle.
    let focus: Option<([EventPoint; 3], [f64; 3])> = match doc.verdict.worst {
        Some(w) => Some((w.vertices, w.lengths)),
        None => doc.triangles.first().and_then(|v| {
            let s = space.as_ref()?;
            let l = |p, q| s.tau(p, q).ok();
            Some((*v, [l(&v[0], &v[1])?, l(&v[1], &v[2])?, l(&v[0], &v[2])?]))
        }),
    };
    let params = ModelParams::new(doc.k).ok();
    let comparison = focus.and_then(|(_, [a, b, c])| {
        let k = params?;
        let tri = k.realize_triangle(a, b, c).ok()?;
        let v = tri.vertices().map(|p| k.chart(&p));
        Some((k, tri, v))
    });

    let mut svg = String::new();
    let width = 2.0 * PANEL;
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{PANEL}" viewBox="0 0 {width} {PANEL}">"#
    );
    let title = format!(
        "{} {:?} k={} : {:?}, {} witnesses",
        doc.command, doc.direction, doc.k, doc.verdict.status, doc.verdict.witnesses.len()
    );
    let _ = writeln!(svg, "  <title>{}</title>", escape(&title));
    let _ = writeln!(svg, r#"  <rect x="0" y="0" width="{width}" height="{PANEL}" fill="white"/>"#);
    let _ = writeln!(svg, r#"  <text x="{MARGIN}" y="18" font-size="12">instance</text>"#);
    let _ = writeln!(svg, r#"  <text x="{}" y="18" font-size="12">comparison, k = {}</text>"#, PANEL + MARGIN, doc.k);

    for (sides, highlighted) in &instance_sides {
        let style = if *highlighted {
            r#"stroke="black" stroke-width="1.5""#
        } else {
            r##"stroke="#999999" stroke-width="0.8""##
        };
        for side in sides {
            left.polyline(&mut svg, side, style, false);
        }
    }
    for w in &doc.verdict.witnesses {
        let (c, class) = color(w.defect);
        left.segment(&mut svg, &w.p.point, &w.q.point, c);
        left.marker(&mut svg, &w.p.point, c, class);
        left.marker(&mut svg, &w.q.point, c, class);
    }

    if let Some((k, tri, v)) = comparison {
        let right = Panel::fit(PANEL, &v);
        right.polyline(&mut svg, &v, r#"stroke="black" stroke-width="1.5""#, true);
        let worst_id = doc.verdict.worst.map(|w| w.triangle_id);
        for w in doc.verdict.witnesses.iter().filter(|w| Some(w.triangle_id) == worst_id) {
            let bar = |side: Side, off: f64| tri.side_point(side, off).ok().map(|p| k.chart(&p));
            if let (Some(p), Some(q)) = (bar(w.p.side, w.p.resolved_offset), bar(w.q.side, w.q.resolved_offset)) {
                let (c, class) = color(w.defect);
                right.segment(&mut svg, &p, &q, c);
                right.marker(&mut svg, &p, c, class);
                right.marker(&mut svg, &q, c, class);
            }
        }
    }
    let _ = writeln!(svg, "</svg>");
    svg
}
