//! SVG rendering of sketches.
//!
//! User units are meters with the y axis flipped so that sketches appear the
//! right way up. Numbers are printed with six significant digits.

mod handdrawn;
mod number;

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use thiserror::Error;

use crate::geom::BBox;
use crate::model::{arc_angles, Primitive, Sketch, StandardPrimitive};
use crate::sequence::{ConstructionOp, ConstructionSequence};
use crate::Vec2;

pub use handdrawn::{bezier_segments, handdrawn_strokes, render_handdrawn, Stroke};
pub use number::fmt_num;

#[derive(Clone, Debug, PartialEq)]
pub struct RenderOptions {
    /// Stroke width in meters; `None` scales with the view.
    pub stroke_width: Option<f64>,
    /// `[min_x, min_y, width, height]` in SVG coordinates; `None` fits the
    /// geometry with a 5% margin.
    pub view_box: Option<[f64; 4]>,
    /// `stroke-dasharray` for construction geometry, in units of the stroke
    /// width.
    pub construction_dash: [f64; 2],
    /// Noise sigma as a fraction of the bounding-box diagonal.
    pub noise_magnitude: f64,
    pub noise_seed: u64,
    /// Embed the sketch id (and seed for hand-drawn output) in a comment.
    pub metadata: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            stroke_width: None,
            view_box: None,
            construction_dash: [4.0, 2.0],
            noise_magnitude: 0.0,
            noise_seed: 0,
            metadata: false,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("sequence does not match the sketch: {0}")]
    InconsistentSequence(String),
}

/// Bounding box of all primitives.
pub fn sketch_bbox<'a, I: IntoIterator<Item = &'a Primitive>>(prims: I) -> BBox {
    let mut b = BBox::empty();
    for p in prims {
        b.union(&p.bbox());
    }
    b
}

/// viewBox for a world-space box: y flipped, 5% margin of the larger side,
/// or a unit margin when the box has no extent.
pub fn fit_view_box(b: &BBox) -> [f64; 4] {
    if b.is_empty() {
        return [-1.0, -1.0, 2.0, 2.0];
    }
    let extent = b.width().max(b.height());
    let m = if extent > 0.0 { 0.05 * extent } else { 1.0 };
    [b.min.x - m, -b.max.y - m, b.width() + 2.0 * m, b.height() + 2.0 * m]
}

struct Canvas {
    stroke: f64,
    dash: String,
    out: String,
}

impl Canvas {
    fn new(view: [f64; 4], o: &RenderOptions, comment: Option<String>) -> Self {
        let stroke = o.stroke_width.unwrap_or(0.004 * view[2].max(view[3]));
        let dash = format!(
            "{} {}",
            fmt_num(o.construction_dash[0] * stroke),
            fmt_num(o.construction_dash[1] * stroke)
        );
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {} {}">"#,
            fmt_num(view[0]),
            fmt_num(view[1]),
            fmt_num(view[2]),
            fmt_num(view[3])
        );
        if let Some(c) = comment {
            let _ = writeln!(out, "<!-- {} -->", c.replace("--", "- -"));
        }
        let _ = writeln!(
            out,
            r#"<g fill="none" stroke="black" stroke-width="{}" stroke-linecap="round">"#,
            fmt_num(stroke)
        );
        Canvas { stroke, dash, out }
    }

    fn attrs(&self, construction: bool) -> String {
        if construction {
            format!(r#" stroke-dasharray="{}""#, self.dash)
        } else {
            String::new()
        }
    }

    fn element(&mut self, body: &str, construction: bool) {
        let a = self.attrs(construction);
        let _ = writeln!(self.out, "{}{a}/>", body);
    }

    fn finish(mut self) -> String {
        self.out.push_str("</g>\n</svg>\n");
        self.out
    }

    fn point_arm(&self) -> f64 {
        2.0 * self.stroke
    }
}

/// `x,y` pair in SVG coordinates.
fn xy(p: Vec2) -> String {
    format!("{} {}", fmt_num(p.x), fmt_num(-p.y))
}

fn arc_path(center: Vec2, r: f64, t0: f64, sweep: f64) -> String {
    let at = |t: f64| center + Vec2::from_angle(t) * r;
    let flag = if sweep > 0.0 { 1 } else { 0 };
    if sweep.abs() >= TAU - 1e-12 {
        let mid = t0 + sweep / 2.0;
        return format!(
            "M {} A {r} {r} 0 0 {flag} {} A {r} {r} 0 0 {flag} {}",
            xy(at(t0)),
            xy(at(mid)),
            xy(at(t0 + sweep)),
            r = fmt_num(r)
        );
    }
    let large = if sweep.abs() > PI { 1 } else { 0 };
    format!(
        "M {} A {r} {r} 0 {large} {flag} {}",
        xy(at(t0)),
        xy(at(t0 + sweep)),
        r = fmt_num(r)
    )
}

fn draw_primitive(c: &mut Canvas, p: &Primitive) {
    let Ok(std) = p.to_standard() else {
        return;
    };
    let cons = p.is_construction;
    match std {
        StandardPrimitive::Point(v) => {
            let a = c.point_arm();
            let body = format!(
                r#"<path d="M {} L {} M {} L {}""#,
                xy(v - Vec2::new(a, 0.0)),
                xy(v + Vec2::new(a, 0.0)),
                xy(v - Vec2::new(0.0, a)),
                xy(v + Vec2::new(0.0, a))
            );
            c.element(&body, cons);
        }
        StandardPrimitive::Line { start, end } => {
            c.element(&format!(r#"<path d="M {} L {}""#, xy(start), xy(end)), cons);
        }
        StandardPrimitive::Circle { center, radius } => {
            c.element(
                &format!(
                    r#"<circle cx="{}" cy="{}" r="{}""#,
                    fmt_num(center.x),
                    fmt_num(-center.y),
                    fmt_num(radius)
                ),
                cons,
            );
        }
        StandardPrimitive::Arc { .. } => {
            if let Some((center, r, t0, sweep)) = arc_angles(&p.geometry) {
                c.element(&format!(r#"<path d="{}""#, arc_path(center, r, t0, sweep)), cons);
            }
        }
        StandardPrimitive::Ellipse {
            center,
            major_dir,
            radius,
            minor_radius,
        } => {
            c.element(
                &format!(
                    r#"<ellipse cx="{cx}" cy="{cy}" rx="{}" ry="{}" transform="rotate({} {cx} {cy})""#,
                    fmt_num(radius),
                    fmt_num(minor_radius),
                    fmt_num(-major_dir.angle().to_degrees()),
                    cx = fmt_num(center.x),
                    cy = fmt_num(-center.y),
                ),
                cons,
            );
        }
        StandardPrimitive::Spline { control_points } => {
            let pts: Vec<String> = control_points
                .iter()
                .map(|&v| format!("{},{}", fmt_num(v.x), fmt_num(-v.y)))
                .collect();
            c.element(&format!(r#"<polyline points="{}""#, pts.join(" ")), cons);
        }
    }
}

fn comment(s: &Sketch, o: &RenderOptions, seed: bool) -> Option<String> {
    o.metadata.then(|| {
        if seed {
            format!("sketch {} seed {}", s.id, o.noise_seed)
        } else {
            format!("sketch {}", s.id)
        }
    })
}

fn render_prims<'a, I>(s: &Sketch, prims: I, view: [f64; 4], o: &RenderOptions) -> String
where
    I: IntoIterator<Item = &'a Primitive>,
{
    let mut c = Canvas::new(view, o, comment(s, o, false));
    for p in prims {
        draw_primitive(&mut c, p);
    }
    c.finish()
}

/// Clean rendering: one element per primitive, in primitive order.
pub fn render_svg(s: &Sketch, o: &RenderOptions) -> String {
    let view = o.view_box.unwrap_or_else(|| fit_view_box(&sketch_bbox(&s.primitives)));
    render_prims(s, &s.primitives, view, o)
}

/// One frame per inserted primitive, all sharing the final view.
pub fn render_steps(s: &Sketch, seq: &ConstructionSequence, o: &RenderOptions) -> Result<Vec<String>, RenderError> {
    let view = o.view_box.unwrap_or_else(|| fit_view_box(&sketch_bbox(&s.primitives)));
    let mut shown: Vec<&Primitive> = Vec::new();
    let mut frames = Vec::new();
    for op in &seq.ops {
        if let ConstructionOp::AddNode { primitive, kind } = op {
            let p = s
                .primitives
                .get(*primitive)
                .ok_or_else(|| RenderError::InconsistentSequence(format!("no primitive {primitive}")))?;
            if p.kind() != *kind {
                return Err(RenderError::InconsistentSequence(format!(
                    "primitive {primitive} is a {}, not a {}",
                    p.kind(),
                    kind
                )));
            }
            shown.push(p);
            frames.push(render_prims(s, shown.iter().copied(), view, o));
        }
    }
    Ok(frames)
}

/// Evenly spaced samples along a primitive, `n` per open stroke or around a
/// closed one. Points yield a single sample.
pub fn sample_primitive(p: &Primitive, n: usize) -> Vec<Vec2> {
    match handdrawn::trace(p, n.max(2)) {
        Some(t) => t.points,
        None => Vec::new(),
    }
}

#[cfg(test)]
mod tests;
