#![allow(dead_code)]

use sg_core::model::{Primitive, Sketch, StandardPrimitive};
use sg_core::Vec2;

pub fn prim(id: &str, s: StandardPrimitive) -> Primitive {
    Primitive::from_standard(id, &s).unwrap()
}

pub fn v(x: f64, y: f64) -> Vec2 {
    Vec2::new(x, y)
}

pub fn line(id: &str, a: Vec2, b: Vec2) -> Primitive {
    prim(id, StandardPrimitive::Line { start: a, end: b })
}

pub fn circle(id: &str, c: Vec2, r: f64) -> Primitive {
    prim(id, StandardPrimitive::Circle { center: c, radius: r })
}

/// A 40 x 30 mm rectangle (bottom, right, top, left), a construction point
/// at the midpoint of the top edge, a circle straight above it and a second
/// circle concentric with the first. No constraints.
pub fn rectangle_with_circles() -> Sketch {
    let mm = |x: f64, y: f64| v(x * 1e-3, y * 1e-3);
    Sketch::new(
        "rectangle-with-circles",
        vec![
            line("bottom", mm(0.0, 0.0), mm(40.0, 0.0)),
            line("right", mm(40.0, 0.0), mm(40.0, 30.0)),
            line("top", mm(40.0, 30.0), mm(0.0, 30.0)),
            line("left", mm(0.0, 30.0), mm(0.0, 0.0)),
            prim("mid", StandardPrimitive::Point(mm(20.0, 30.0))).construction(true),
            circle("upper", mm(20.0, 45.0), 5e-3),
            circle("ring", mm(20.0, 45.0), 8e-3),
        ],
        vec![],
    )
}
