//! Jittered strokes.
//!
//! Knots are sampled along each primitive and pushed along the local normal
//! by Gaussian noise truncated at three sigma, then joined by the cubic
//! Bézier form of a uniform Catmull-Rom spline. With zero noise the curve
//! passes exactly through the clean knots.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{draw_primitive, fit_view_box, sketch_bbox, xy, Canvas, RenderOptions};
use crate::model::{arc_angles, Primitive, Sketch, StandardPrimitive};
use crate::Vec2;

/// Knot polyline of one jittered primitive.
#[derive(Clone, Debug, PartialEq)]
pub struct Stroke {
    pub knots: Vec<Vec2>,
    pub closed: bool,
}

pub(super) struct Trace {
    pub points: Vec<Vec2>,
    pub normals: Vec<Vec2>,
    pub closed: bool,
}

const MAX_ARC_STEP: f64 = TAU / 64.0;
const KNOTS_PER_DIAGONAL: f64 = 48.0;

fn polyline(pts: &[Vec2], per_segment: usize) -> Trace {
    let mut points = Vec::new();
    let mut normals = Vec::new();
    for (i, w) in pts.windows(2).enumerate() {
        let n = (w[1] - w[0]).perp().normalized().unwrap_or(Vec2::new(0.0, 1.0));
        let first = if i == 0 { 0 } else { 1 };
        for k in first..=per_segment {
            points.push(w[0].lerp(w[1], k as f64 / per_segment as f64));
            normals.push(n);
        }
    }
    if pts.len() == 1 {
        points.push(pts[0]);
        normals.push(Vec2::new(0.0, 1.0));
    }
    Trace {
        points,
        normals,
        closed: false,
    }
}

fn conic(center: Vec2, u: Vec2, a: f64, b: f64, t0: f64, sweep: f64, n: usize, closed: bool) -> Trace {
    let v = u.perp();
    let count = if closed { n } else { n.max(2) };
    let denom = if closed { n as f64 } else { (count - 1) as f64 };
    let mut points = Vec::with_capacity(count);
    let mut normals = Vec::with_capacity(count);
    for k in 0..count {
        let t = t0 + sweep * k as f64 / denom;
        let (s, c) = t.sin_cos();
        points.push(center + u * (a * c) + v * (b * s));
        let tangent = u * (-a * s) + v * (b * c);
        normals.push(tangent.perp().normalized().unwrap_or(u * c + v * s));
    }
    Trace { points, normals, closed }
}

/// Clean knots of `p`; `n` is the knot count for curves, or per segment for
/// lines and spline polylines. `None` for points.
pub(super) fn trace(p: &Primitive, n: usize) -> Option<Trace> {
    let std = p.to_standard().ok()?;
    Some(match std {
        StandardPrimitive::Point(_) => return None,
        StandardPrimitive::Line { start, end } => polyline(&[start, end], n - 1),
        StandardPrimitive::Spline { control_points } => polyline(&control_points, n - 1),
        StandardPrimitive::Circle { center, radius } => {
            conic(center, Vec2::new(1.0, 0.0), radius, radius, 0.0, TAU, n, true)
        }
        StandardPrimitive::Arc { .. } => {
            let (center, r, t0, sweep) = arc_angles(&p.geometry)?;
            let closed = sweep.abs() >= TAU - 1e-12;
            conic(center, Vec2::new(1.0, 0.0), r, r, t0, sweep, n, closed)
        }
        StandardPrimitive::Ellipse {
            center,
            major_dir,
            radius,
            minor_radius,
        } => conic(center, major_dir, radius, minor_radius, 0.0, TAU, n, true),
    })
}

fn knot_count(p: &Primitive, diag: f64) -> usize {
    let step = if diag > 0.0 { diag / KNOTS_PER_DIAGONAL } else { 1.0 };
    let by_length = |len: f64| ((len / step).ceil() as usize).clamp(1, 256);
    match p.to_standard() {
        Ok(StandardPrimitive::Line { start, end }) => by_length(start.distance(end)) + 1,
        Ok(StandardPrimitive::Spline { control_points }) => {
            let longest = control_points
                .windows(2)
                .map(|w| w[0].distance(w[1]))
                .fold(0.0, f64::max);
            by_length(longest) + 1
        }
        Ok(StandardPrimitive::Circle { radius, .. }) => by_length(TAU * radius).max(64),
        Ok(StandardPrimitive::Ellipse { radius, .. }) => by_length(TAU * radius).max(64),
        Ok(StandardPrimitive::Arc { .. }) => {
            let (_, r, _, sweep) = arc_angles(&p.geometry).unwrap_or_default();
            let angular = (sweep.abs() / MAX_ARC_STEP).ceil() as usize;
            by_length(sweep.abs() * r).max(angular).max(2) + 1
        }
        _ => 1,
    }
}

fn sigma(s: &Sketch, o: &RenderOptions) -> f64 {
    o.noise_magnitude.max(0.0) * sketch_bbox(&s.primitives).diagonal()
}

fn truncated_normal(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let z: f64 = StandardNormal.sample(rng);
        if z.abs() <= 3.0 {
            return z;
        }
    }
}

/// Jittered knots for every primitive in order; `None` for points, which
/// are drawn unjittered.
pub fn handdrawn_strokes(s: &Sketch, o: &RenderOptions) -> Vec<Option<Stroke>> {
    let sigma = sigma(s, o);
    let diag = sketch_bbox(&s.primitives).diagonal();
    let mut rng = ChaCha8Rng::seed_from_u64(o.noise_seed);
    s.primitives
        .iter()
        .map(|p| {
            let t = trace(p, knot_count(p, diag))?;
            let knots = t
                .points
                .iter()
                .zip(&t.normals)
                .map(|(&q, &n)| {
                    let z = truncated_normal(&mut rng);
                    q + n * (z * sigma)
                })
                .collect();
            Some(Stroke {
                knots,
                closed: t.closed,
            })
        })
        .collect()
}

/// Catmull-Rom segments `[p1, c1, c2, p2]` through the stroke's knots.
/// Open ends use reflected phantom knots.
pub fn bezier_segments(st: &Stroke) -> Vec<[Vec2; 4]> {
    let k = &st.knots;
    let n = k.len();
    if n < 2 {
        return Vec::new();
    }
    let at = |i: isize| -> Vec2 {
        if st.closed {
            k[i.rem_euclid(n as isize) as usize]
        } else if i < 0 {
            k[0] * 2.0 - k[1]
        } else if i as usize >= n {
            k[n - 1] * 2.0 - k[n - 2]
        } else {
            k[i as usize]
        }
    };
    let segs = if st.closed { n } else { n - 1 };
    (0..segs as isize)
        .map(|i| {
            let (p0, p1, p2, p3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
            [p1, p1 + (p2 - p0) * (1.0 / 6.0), p2 - (p3 - p1) * (1.0 / 6.0), p2]
        })
        .collect()
}

fn stroke_path(st: &Stroke) -> String {
    let segs = bezier_segments(st);
    let mut d = format!("M {}", xy(st.knots[0]));
    for [_, c1, c2, p2] in &segs {
        let _ = write!(d, " C {} {} {}", xy(*c1), xy(*c2), xy(*p2));
    }
    if st.closed {
        d.push_str(" Z");
    }
    format!(r#"<path d="{d}""#)
}

/// Hand-drawn rendering. Noise sigma is `noise_magnitude` times the
/// bounding-box diagonal; the view grows by four sigma so every curve stays
/// inside it.
pub fn render_handdrawn(s: &Sketch, o: &RenderOptions) -> String {
    let sigma = sigma(s, o);
    let view = o.view_box.unwrap_or_else(|| {
        let mut b = sketch_bbox(&s.primitives);
        if !b.is_empty() {
            let pad = Vec2::new(4.0 * sigma, 4.0 * sigma);
            b.include(b.min - pad);
            b.include(b.max + pad);
        }
        fit_view_box(&b)
    });
    let mut c = Canvas::new(view, o, super::comment(s, o, true));
    for (p, st) in s.primitives.iter().zip(handdrawn_strokes(s, o)) {
        match st {
            Some(st) if !st.knots.is_empty() => c.element(&stroke_path(&st), p.is_construction),
            _ => draw_primitive(&mut c, p),
        }
    }
    c.finish()
}

#[cfg(test)]
pub(super) fn eval_bezier(b: &[Vec2; 4], t: f64) -> Vec2 {
    let u = 1.0 - t;
    b[0] * (u * u * u) + b[1] * (3.0 * u * u * t) + b[2] * (3.0 * u * t * t) + b[3] * (t * t * t)
}
