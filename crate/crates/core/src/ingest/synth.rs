//! Deterministic synthetic corpora built from parametric templates.
//!
//! Every sketch is generated from exact geometry, so each emitted constraint
//! holds up to floating-point rounding. Sketch `i` draws from its own
//! ChaCha stream, which keeps generation lazy and order independent.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    Constraint, ConstraintType as T, EntityRef, HalfSpace, Primitive, Selector, Sketch, StandardPrimitive,
};
use crate::units::{Length, LengthUnit};
use crate::Vec2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GeneratorProfile {
    /// Point/Line/Circle/Arc only, at most 16 primitives, constraints that
    /// candidate enumeration can reproduce.
    #[default]
    Autoconstrain,
    /// Adds unconstrained ellipses and splines, construction geometry,
    /// angle dimensions and mixed units.
    Mixed,
}

impl GeneratorProfile {
    pub fn name(self) -> &'static str {
        match self {
            GeneratorProfile::Autoconstrain => "autoconstrain",
            GeneratorProfile::Mixed => "mixed",
        }
    }
}

impl FromStr for GeneratorProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "autoconstrain" => Ok(GeneratorProfile::Autoconstrain),
            "mixed" => Ok(GeneratorProfile::Mixed),
            _ => Err(format!("unknown profile {s:?} (expected autoconstrain or mixed)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Template {
    Rectangle,
    SlottedPlate,
    BoltCircle,
    RoundedRectangle,
}

impl Template {
    pub const ALL: [Template; 4] = [
        Template::Rectangle,
        Template::SlottedPlate,
        Template::BoltCircle,
        Template::RoundedRectangle,
    ];
}

struct Builder<'r> {
    rng: &'r mut ChaCha8Rng,
    mixed: bool,
    prims: Vec<Primitive>,
    cons: Vec<Constraint>,
}

fn w(id: &str) -> EntityRef {
    EntityRef::whole(id)
}

fn e(id: &str, s: Selector) -> EntityRef {
    EntityRef::sub(id, s)
}

fn side(p: Vec2, a: Vec2, b: Vec2) -> HalfSpace {
    HalfSpace::from_sign((b - a).cross(p - a))
}

impl Builder<'_> {
    /// A length drawn on a unit grid: whole millimeters, or in the mixed
    /// profile sometimes half centimeters or eighth inches.
    fn dim(&mut self, lo_mm: u32, hi_mm: u32) -> Length {
        let mm = self.rng.gen_range(lo_mm..=hi_mm);
        if self.mixed {
            match self.rng.gen_range(0..4) {
                0 => return Length::new((mm as f64 / 5.0).round().max(1.0) * 0.5, LengthUnit::Centimeter),
                1 => return Length::new((mm as f64 / 3.175).round().max(1.0) * 0.125, LengthUnit::Inch),
                _ => {}
            }
        }
        Length::mm(mm as f64)
    }

    fn add(&mut self, id: &str, s: StandardPrimitive) -> String {
        let p = Primitive::from_standard(id, &s).expect("template geometry is valid");
        self.prims.push(p);
        id.to_string()
    }

    fn line(&mut self, id: &str, a: Vec2, b: Vec2) -> String {
        self.add(id, StandardPrimitive::Line { start: a, end: b })
    }

    fn arc(&mut self, id: &str, c: Vec2, r: f64, t0: f64, t1: f64) -> String {
        self.add(
            id,
            StandardPrimitive::Arc {
                center: c,
                radius: r,
                start: c + Vec2::from_angle(t0) * r,
                end: c + Vec2::from_angle(t1) * r,
                clockwise: false,
            },
        )
    }

    fn circle(&mut self, id: &str, c: Vec2, r: f64) -> String {
        self.add(id, StandardPrimitive::Circle { center: c, radius: r })
    }

    fn push(&mut self, c: Constraint) {
        self.cons.push(c);
    }

    fn join(&mut self, a: &str, sa: Selector, b: &str, sb: Selector) {
        self.push(Constraint::pair(T::Coincident, e(a, sa), e(b, sb)));
    }

    fn origin(&mut self) -> Vec2 {
        Vec2::new(
            self.rng.gen_range(-50..=50) as f64 * 1e-3,
            self.rng.gen_range(-50..=50) as f64 * 1e-3,
        )
    }

    /// Closed axis-aligned box `b r t l`, counter-clockwise from the lower
    /// left corner.
    fn boxed(&mut self, o: Vec2, wd: Length, ht: Length) -> [String; 4] {
        let (x, y) = (wd.meters(), ht.meters());
        let c = [o, o + Vec2::new(x, 0.0), o + Vec2::new(x, y), o + Vec2::new(0.0, y)];
        let n = self.prims.len();
        let ids = ["b", "r", "t", "l"].map(|s| format!("{s}{n}"));
        for i in 0..4 {
            self.line(&ids[i], c[i], c[(i + 1) % 4]);
        }
        for i in 0..4 {
            self.join(&ids[i], Selector::End, &ids[(i + 1) % 4], Selector::Start);
        }
        self.push(Constraint::new(T::Horizontal, vec![w(&ids[0])]));
        self.push(Constraint::new(T::Horizontal, vec![w(&ids[2])]));
        self.push(Constraint::new(T::Vertical, vec![w(&ids[1])]));
        self.push(Constraint::new(T::Vertical, vec![w(&ids[3])]));
        self.push(Constraint::line_length(w(&ids[0]), wd));
        self.push(Constraint::line_length(w(&ids[1]), ht));
        ids
    }

    fn rectangle(&mut self) {
        let o = self.origin();
        let (wd, ht) = (self.dim(10, 120), self.dim(10, 120));
        let ids = self.boxed(o, wd, ht);
        if self.mixed && self.rng.gen_bool(0.5) {
            let (x, y) = (wd.meters(), ht.meters());
            let d = self.line("diag", o, o + Vec2::new(x, y));
            self.prims.last_mut().unwrap().is_construction = true;
            self.join(&d, Selector::Start, &ids[0], Selector::Start);
            self.join(&d, Selector::End, &ids[1], Selector::End);
            let deg = y.atan2(x).to_degrees();
            self.push(Constraint::pair(T::Angle, w(&ids[0]), w(&d)).with_angle(deg, true, false));
        }
    }

    /// Box with a horizontal slot of two half-circle arcs and two lines.
    fn slotted_plate(&mut self) {
        let o = self.origin();
        let r_mm = self.rng.gen_range(2..=8);
        let half_mm = self.rng.gen_range(4..=20);
        let wd = self.dim(2 * (half_mm + r_mm) + 10, 150);
        let ht = self.dim(2 * r_mm + 10, 100);
        self.boxed(o, wd, ht);
        let r = r_mm as f64 * 1e-3;
        let half = half_mm as f64 * 1e-3;
        let c = o + Vec2::new(wd.meters() / 2.0, ht.meters() / 2.0);
        let (cl, cr) = (c - Vec2::new(half, 0.0), c + Vec2::new(half, 0.0));
        let top = self.line("st", cl + Vec2::new(0.0, r), cr + Vec2::new(0.0, r));
        let bot = self.line("sb", cr - Vec2::new(0.0, r), cl - Vec2::new(0.0, r));
        let left = self.arc("sl", cl, r, FRAC_PI_2, 3.0 * FRAC_PI_2);
        let right = self.arc("sr", cr, r, -FRAC_PI_2, FRAC_PI_2);
        self.join(&left, Selector::Start, &top, Selector::Start);
        self.join(&left, Selector::End, &bot, Selector::End);
        self.join(&right, Selector::Start, &bot, Selector::Start);
        self.join(&right, Selector::End, &top, Selector::End);
        for (l, a) in [(&top, &left), (&top, &right), (&bot, &left), (&bot, &right)] {
            self.push(Constraint::pair(T::Tangent, w(l), w(a)));
        }
        self.push(Constraint::pair(T::Equal, w(&left), w(&right)));
        self.push(Constraint::new(T::Horizontal, vec![w(&top)]));
        self.push(Constraint::dimension(T::Radius, w(&left), Length::mm(r_mm as f64)));
        self.push(Constraint::line_length(w(&top), Length::mm(2.0 * half_mm as f64)));
    }

    /// Outer circle, concentric construction pitch circle and evenly spaced
    /// equal holes centered on it.
    fn bolt_circle(&mut self) {
        let c = self.origin();
        let holes = self.rng.gen_range(3..=6);
        let hole_mm = self.rng.gen_range(1..=4);
        let pitch_mm = self.rng.gen_range(hole_mm * 3 + 5..=40);
        let outer_mm = self.rng.gen_range(pitch_mm + hole_mm + 3..=pitch_mm + hole_mm + 30);
        let outer = self.circle("outer", c, outer_mm as f64 * 1e-3);
        let pitch = self.circle("pitch", c, pitch_mm as f64 * 1e-3);
        self.prims.last_mut().unwrap().is_construction = true;
        self.push(Constraint::pair(T::Concentric, w(&outer), w(&pitch)));
        self.push(Constraint::dimension(T::Diameter, w(&outer), Length::mm(2.0 * outer_mm as f64)));
        self.push(Constraint::dimension(T::Diameter, w(&pitch), Length::mm(2.0 * pitch_mm as f64)));
        let phase = self.rng.gen_range(0..12) as f64 * PI / 12.0;
        let mut first = String::new();
        for k in 0..holes {
            let t = phase + TAU * k as f64 / holes as f64;
            let at = c + Vec2::from_angle(t) * (pitch_mm as f64 * 1e-3);
            let h = self.circle(&format!("h{k}"), at, hole_mm as f64 * 1e-3);
            self.push(Constraint::pair(T::Coincident, e(&h, Selector::Center), w(&pitch)));
            if k == 0 {
                self.push(Constraint::dimension(T::Radius, w(&h), Length::mm(hole_mm as f64)));
                first = h;
            } else {
                self.push(Constraint::pair(T::Equal, w(&first), w(&h)));
            }
        }
    }

    /// Closed polyline of four lines with tangent corner fillets.
    fn rounded_rectangle(&mut self) {
        let o = self.origin();
        let f_mm = self.rng.gen_range(1..=8);
        let wd = self.dim(2 * f_mm + 5, 120);
        let ht = self.dim(2 * f_mm + 5, 120);
        let (x, y, f) = (wd.meters(), ht.meters(), f_mm as f64 * 1e-3);
        let p = |u: f64, v: f64| o + Vec2::new(u, v);
        let b = self.line("b", p(f, 0.0), p(x - f, 0.0));
        let br = self.arc("fbr", p(x - f, f), f, -FRAC_PI_2, 0.0);
        let r = self.line("r", p(x, f), p(x, y - f));
        let tr = self.arc("ftr", p(x - f, y - f), f, 0.0, FRAC_PI_2);
        let t = self.line("t", p(x - f, y), p(f, y));
        let tl = self.arc("ftl", p(f, y - f), f, FRAC_PI_2, PI);
        let l = self.line("l", p(0.0, y - f), p(0.0, f));
        let bl = self.arc("fbl", p(f, f), f, PI, 3.0 * FRAC_PI_2);
        let ring = [&b, &br, &r, &tr, &t, &tl, &l, &bl];
        for i in 0..8 {
            let (u, v) = (ring[i].clone(), ring[(i + 1) % 8].clone());
            self.join(&u, Selector::End, &v, Selector::Start);
        }
        for i in 0..8 {
            let (u, v) = (ring[i].clone(), ring[(i + 1) % 8].clone());
            let (line, arc) = if i % 2 == 0 { (u, v) } else { (v, u) };
            self.push(Constraint::pair(T::Tangent, w(&line), w(&arc)));
        }
        for a in [&tr, &tl, &bl] {
            self.push(Constraint::pair(T::Equal, w(&br), w(a)));
        }
        self.push(Constraint::new(T::Horizontal, vec![w(&b)]));
        self.push(Constraint::new(T::Horizontal, vec![w(&t)]));
        self.push(Constraint::new(T::Vertical, vec![w(&l)]));
        self.push(Constraint::new(T::Vertical, vec![w(&r)]));
        self.push(Constraint::dimension(T::Radius, w(&br), Length::mm(f_mm as f64)));
        let mid = |s: &Sketch, id: &str| {
            let StandardPrimitive::Line { start, end } = s.primitive(id).unwrap().to_standard().unwrap() else {
                unreachable!()
            };
            (start, end)
        };
        let tmp = Sketch::new("", self.prims.clone(), vec![]);
        for (a, c, len) in [(&l, &r, wd), (&b, &t, ht)] {
            let (a0, a1) = mid(&tmp, a);
            let (c0, c1) = mid(&tmp, c);
            let h = side(c0.lerp(c1, 0.5), a0, a1);
            self.push(Constraint::distance(w(a), w(c), len).with_half_spaces(h, h));
        }
    }

    /// Unconstrained extras for the mixed profile.
    fn decorate(&mut self) {
        if self.rng.gen_bool(0.25) {
            let c = self.origin();
            let major = self.rng.gen_range(5..=20) as f64 * 1e-3;
            let t = self.rng.gen_range(0..8) as f64 * PI / 8.0;
            self.add(
                "ell",
                StandardPrimitive::Ellipse {
                    center: c,
                    major_dir: Vec2::from_angle(t),
                    radius: major,
                    minor_radius: major * 0.5,
                },
            );
        }
        if self.rng.gen_bool(0.1) {
            let o = self.origin();
            let pts = (0..4)
                .map(|i| o + Vec2::new(i as f64 * 0.01, self.rng.gen_range(-10..=10) as f64 * 1e-3))
                .collect();
            self.add("spl", StandardPrimitive::Spline { control_points: pts });
        }
    }
}

/// One sketch from a given template.
pub fn synth_sketch(id: impl Into<String>, template: Template, profile: GeneratorProfile, rng: &mut ChaCha8Rng) -> Sketch {
    let mut b = Builder {
        rng,
        mixed: profile == GeneratorProfile::Mixed,
        prims: Vec::new(),
        cons: Vec::new(),
    };
    match template {
        Template::Rectangle => b.rectangle(),
        Template::SlottedPlate => b.slotted_plate(),
        Template::BoltCircle => b.bolt_circle(),
        Template::RoundedRectangle => b.rounded_rectangle(),
    }
    if b.mixed {
        b.decorate();
    }
    Sketch::new(id, b.prims, b.cons)
}

fn sketch_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Sketch `index` of the corpus `(seed, profile)`.
pub fn synth_nth(index: u64, seed: u64, profile: GeneratorProfile) -> Sketch {
    let mut rng = sketch_rng(seed, index);
    let template = Template::ALL[rng.gen_range(0..Template::ALL.len())];
    synth_sketch(format!("synth-{seed}-{index}"), template, profile, &mut rng)
}

/// Lazy stream of `n` synthetic sketches.
pub fn synth_corpus(n: u64, seed: u64, profile: GeneratorProfile) -> impl Iterator<Item = Sketch> {
    (0..n).map(move |i| synth_nth(i, seed, profile))
}

/// Copy of `s` with every point of every primitive moved by up to
/// `magnitude` times the bounding-box diagonal in each coordinate. Radii
/// change by the same amount but stay positive.
pub fn perturb_geometry(s: &Sketch, magnitude: f64, seed: u64) -> Sketch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bbox = crate::geom::BBox::empty();
    for p in &s.primitives {
        bbox.union(&p.bbox());
    }
    let amp = magnitude * bbox.diagonal();
    let mut jitter = move || amp * rng.gen_range(-1.0..=1.0);
    let mut out = s.clone();
    for p in &mut out.primitives {
        let Ok(std) = p.to_standard() else { continue };
        let mut mv = |v: Vec2| v + Vec2::new(jitter(), jitter());
        let moved = match std {
            StandardPrimitive::Point(v) => StandardPrimitive::Point(mv(v)),
            StandardPrimitive::Line { start, end } => StandardPrimitive::Line {
                start: mv(start),
                end: mv(end),
            },
            StandardPrimitive::Circle { center, radius } => StandardPrimitive::Circle {
                center: mv(center),
                radius: (radius + mv(Vec2::ZERO).x).max(radius * 0.5),
            },
            StandardPrimitive::Arc {
                center,
                radius,
                start,
                end,
                clockwise,
            } => {
                let center2 = mv(center);
                let r2 = (radius + mv(Vec2::ZERO).x).max(radius * 0.5);
                let at = |q: Vec2| center2 + (q - center).normalized().unwrap_or(Vec2::new(1.0, 0.0)) * r2;
                StandardPrimitive::Arc {
                    center: center2,
                    radius: r2,
                    start: at(mv(start)),
                    end: at(mv(end)),
                    clockwise,
                }
            }
            other => other,
        };
        if let Ok(g) = crate::model::from_standard(&moved) {
            p.geometry = g;
        }
    }
    out
}
