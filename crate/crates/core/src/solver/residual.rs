//! Residual functions for every solver-supported constraint.
//!
//! Each constraint maps the geometry it references to a small vector that is
//! zero exactly when the relation holds. Lengths are compared in meters and
//! angles in radians. The vector's length is fixed by the constraint type and
//! the kinds of entities it references, never by their values.

use std::f64::consts::PI;
use std::ops::{Add, Sub};

use super::dual::Scalar;
use super::SolveError;
use crate::model::{Constraint, ConstraintType, Direction, HalfSpace, PrimitiveType, Selector};

#[derive(Clone, Copy, Debug)]
pub struct P<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> P<T> {
    pub fn new(x: T, y: T) -> Self {
        P { x, y }
    }
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }
    pub fn scale(self, k: T) -> Self {
        P::new(self.x * k, self.y * k)
    }
    pub fn unit(self) -> Self {
        let n = self.norm();
        P::new(self.x / n, self.y / n)
    }
    pub fn mid(self, o: Self) -> Self {
        P::new((self.x + o.x).scale(0.5), (self.y + o.y).scale(0.5))
    }
}

impl<T: Scalar> Add for P<T> {
    type Output = P<T>;
    fn add(self, o: Self) -> Self {
        P::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> Sub for P<T> {
    type Output = P<T>;
    fn sub(self, o: Self) -> Self {
        P::new(self.x - o.x, self.y - o.y)
    }
}

/// A primitive's position in solver variables.
///
/// Variables per type: point `[x, y]`, line `[sx, sy, ex, ey]`, circle
/// `[cx, cy, r]`, arc `[cx, cy, r, startParam, endParam]`. Arc angles stay
/// relative to the stored direction and orientation, which are constants.
#[derive(Clone, Copy, Debug)]
pub enum PrimState<T> {
    Point(P<T>),
    Line { a: P<T>, b: P<T> },
    Circle { c: P<T>, r: T },
    Arc { c: P<T>, r: T, t0: T, t1: T, base: f64, sense: f64 },
}

/// Constant per-primitive data that is not a variable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcFrame {
    pub base: f64,
    pub sense: f64,
}

pub fn state_from_values<T: Scalar>(kind: PrimitiveType, v: &[T], frame: Option<ArcFrame>) -> PrimState<T> {
    match kind {
        PrimitiveType::Point => PrimState::Point(P::new(v[0], v[1])),
        PrimitiveType::Line => PrimState::Line {
            a: P::new(v[0], v[1]),
            b: P::new(v[2], v[3]),
        },
        PrimitiveType::Circle => PrimState::Circle {
            c: P::new(v[0], v[1]),
            r: v[2],
        },
        PrimitiveType::Arc => {
            let f = frame.expect("arc frame");
            PrimState::Arc {
                c: P::new(v[0], v[1]),
                r: v[2],
                t0: v[3],
                t1: v[4],
                base: f.base,
                sense: f.sense,
            }
        }
        _ => unreachable!("unsupported primitives have no state"),
    }
}

/// What a constraint local resolves to.
#[derive(Clone, Copy, Debug)]
pub enum Entity<T> {
    Point(P<T>),
    Line(P<T>, P<T>),
    Circle { c: P<T>, r: T },
    Arc { c: P<T>, r: T, start: P<T>, end: P<T> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EntityClass {
    Point,
    Line,
    Circle,
    Arc,
}

impl EntityClass {
    pub fn is_round(self) -> bool {
        matches!(self, EntityClass::Circle | EntityClass::Arc)
    }
}

/// Class of the entity a reference denotes, from types alone.
pub fn entity_class(kind: PrimitiveType, sel: Option<Selector>) -> Option<EntityClass> {
    match (kind, sel) {
        (_, Some(_)) => Some(EntityClass::Point),
        (PrimitiveType::Point, None) => Some(EntityClass::Point),
        (PrimitiveType::Line, None) => Some(EntityClass::Line),
        (PrimitiveType::Circle, None) => Some(EntityClass::Circle),
        (PrimitiveType::Arc, None) => Some(EntityClass::Arc),
        _ => None,
    }
}

fn arc_point<T: Scalar>(c: P<T>, r: T, t: T, base: f64, sense: f64) -> P<T> {
    let ang = t.scale(sense) + T::cst(base);
    P::new(c.x + r * ang.cos(), c.y + r * ang.sin())
}

pub fn resolve<T: Scalar>(state: &PrimState<T>, sel: Option<Selector>) -> Entity<T> {
    match (*state, sel) {
        (PrimState::Point(p), _) => Entity::Point(p),
        (PrimState::Line { a, b }, None) => Entity::Line(a, b),
        (PrimState::Line { a, .. }, Some(Selector::Start)) => Entity::Point(a),
        (PrimState::Line { b, .. }, Some(_)) => Entity::Point(b),
        (PrimState::Circle { c, r }, None) => Entity::Circle { c, r },
        (PrimState::Circle { c, .. }, Some(_)) => Entity::Point(c),
        (PrimState::Arc { c, r, t0, t1, base, sense }, None) => Entity::Arc {
            c,
            r,
            start: arc_point(c, r, t0, base, sense),
            end: arc_point(c, r, t1, base, sense),
        },
        (PrimState::Arc { c, r, t0, base, sense, .. }, Some(Selector::Start)) => {
            Entity::Point(arc_point(c, r, t0, base, sense))
        }
        (PrimState::Arc { c, r, t1, base, sense, .. }, Some(Selector::End)) => {
            Entity::Point(arc_point(c, r, t1, base, sense))
        }
        (PrimState::Arc { c, .. }, Some(Selector::Center)) => Entity::Point(c),
    }
}

impl<T: Scalar> Entity<T> {
    pub fn class(&self) -> EntityClass {
        match self {
            Entity::Point(_) => EntityClass::Point,
            Entity::Line(..) => EntityClass::Line,
            Entity::Circle { .. } => EntityClass::Circle,
            Entity::Arc { .. } => EntityClass::Arc,
        }
    }

    fn round(&self) -> Option<(P<T>, T)> {
        match *self {
            Entity::Circle { c, r } | Entity::Arc { c, r, .. } => Some((c, r)),
            _ => None,
        }
    }

    fn center_like(&self) -> Option<P<T>> {
        match *self {
            Entity::Point(p) => Some(p),
            Entity::Circle { c, .. } | Entity::Arc { c, .. } => Some(c),
            Entity::Line(..) => None,
        }
    }
}

/// Which circle-circle tangency a residual measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TangentBranch {
    External,
    Internal,
}

/// Signed distance of `p` from the infinite line through `a`, `b`; positive
/// on the left of the direction `a -> b`.
fn signed_distance<T: Scalar>(p: P<T>, a: P<T>, b: P<T>) -> T {
    let d = b - a;
    d.cross(p - a) / d.norm()
}

/// Reflection of `p` across the infinite line through `a`, `b`.
fn reflect<T: Scalar>(p: P<T>, a: P<T>, b: P<T>) -> P<T> {
    let u = (b - a).unit();
    let v = p - a;
    let along = u.scale(v.dot(u).scale(2.0));
    a + along - v
}

/// Map an angle difference into (-pi, pi].
fn wrap_angle<T: Scalar>(a: T) -> T {
    let v = a.val();
    let k = ((PI - v) / (2.0 * PI)).floor();
    a + T::cst(2.0 * PI * k)
}

fn unsupported(c: &Constraint, classes: &[EntityClass]) -> SolveError {
    SolveError::UnsupportedConstraint {
        kind: c.kind,
        detail: format!("{classes:?}"),
    }
}

fn signed_or_abs<T: Scalar>(v: T, side: Option<HalfSpace>) -> T {
    match side {
        Some(h) => v.scale(h.sign()),
        None => v.abs(),
    }
}

fn half_space(c: &Constraint, local: usize) -> Option<HalfSpace> {
    if local == 0 {
        c.half_space0
    } else {
        c.half_space1
    }
}

fn tangent_pair<T: Scalar>(c1: P<T>, r1: T, c2: P<T>, r2: T, branch: TangentBranch) -> T {
    let d = (c1 - c2).norm();
    match branch {
        TangentBranch::External => d - (r1 + r2),
        TangentBranch::Internal => d - (r1 - r2).abs(),
    }
}

/// The branch whose residual is nearer zero for this geometry.
pub fn pick_tangent_branch<T: Scalar>(ents: &[Entity<T>]) -> TangentBranch {
    if let [a, b] = ents {
        if let (Some((c1, r1)), Some((c2, r2))) = (a.round(), b.round()) {
            let ext = tangent_pair(c1, r1, c2, r2, TangentBranch::External).val().abs();
            let int = tangent_pair(c1, r1, c2, r2, TangentBranch::Internal).val().abs();
            if int < ext {
                return TangentBranch::Internal;
            }
        }
    }
    TangentBranch::External
}

fn target_length<T: Scalar>(c: &Constraint) -> Result<T, SolveError> {
    c.length
        .map(|l| T::cst(l.meters()))
        .ok_or(SolveError::MissingValue { kind: c.kind })
}

/// Evaluate the residual vector of `c` over its resolved locals.
pub fn constraint_residuals<T: Scalar>(
    c: &Constraint,
    ents: &[Entity<T>],
    branch: TangentBranch,
) -> Result<Vec<T>, SolveError> {
    use ConstraintType as K;
    use Entity as E;
    let classes: Vec<EntityClass> = ents.iter().map(Entity::class).collect();
    let bad = || unsupported(c, &classes);
    let r = match (c.kind, ents) {
        (K::Coincident, [a, b]) => match (*a, *b) {
            (E::Point(p), E::Point(q)) => vec![p.x - q.x, p.y - q.y],
            (E::Point(p), E::Line(a, b)) | (E::Line(a, b), E::Point(p)) => vec![signed_distance(p, a, b)],
            (E::Point(p), E::Circle { c, r } | E::Arc { c, r, .. })
            | (E::Circle { c, r } | E::Arc { c, r, .. }, E::Point(p)) => vec![(p - c).norm() - r],
            (E::Line(a1, b1), E::Line(a2, b2)) => {
                vec![signed_distance(a2, a1, b1), signed_distance(b2, a1, b1)]
            }
            (x, y) => match (x.round(), y.round()) {
                (Some((c1, r1)), Some((c2, r2))) => vec![c1.x - c2.x, c1.y - c2.y, r1 - r2],
                _ => return Err(bad()),
            },
        },
        (K::Horizontal | K::Vertical, _) => {
            let horizontal = c.kind == K::Horizontal;
            let (p, q) = match ents {
                [E::Line(a, b)] => (*a, *b),
                [E::Point(p), E::Point(q)] => (*p, *q),
                _ => return Err(bad()),
            };
            vec![if horizontal { q.y - p.y } else { q.x - p.x }]
        }
        (K::Parallel | K::Perpendicular, [E::Line(a1, b1), E::Line(a2, b2)]) => {
            let u = (*b1 - *a1).unit();
            let v = (*b2 - *a2).unit();
            vec![if c.kind == K::Parallel { u.cross(v) } else { u.dot(v) }]
        }
        (K::Tangent, [a, b]) => match (*a, *b) {
            (E::Line(p, q), E::Circle { c, r } | E::Arc { c, r, .. })
            | (E::Circle { c, r } | E::Arc { c, r, .. }, E::Line(p, q)) => {
                vec![signed_distance(c, p, q).abs() - r]
            }
            (x, y) => match (x.round(), y.round()) {
                (Some((c1, r1)), Some((c2, r2))) => vec![tangent_pair(c1, r1, c2, r2, branch)],
                _ => return Err(bad()),
            },
        },
        (K::Equal, [a, b]) => match (*a, *b) {
            (E::Line(a1, b1), E::Line(a2, b2)) => vec![(b1 - a1).norm() - (b2 - a2).norm()],
            (x, y) => match (x.round(), y.round()) {
                (Some((_, r1)), Some((_, r2))) => vec![r1 - r2],
                _ => return Err(bad()),
            },
        },
        (K::Concentric, [a, b]) => match (a.center_like(), b.center_like()) {
            (Some(p), Some(q)) if a.round().is_some() || b.round().is_some() => vec![p.x - q.x, p.y - q.y],
            _ => return Err(bad()),
        },
        (K::Midpoint, [a, b]) => match (*a, *b) {
            (E::Point(p), E::Line(s, e)) | (E::Line(s, e), E::Point(p)) => {
                let m = s.mid(e);
                vec![p.x - m.x, p.y - m.y]
            }
            _ => return Err(bad()),
        },
        (K::Mirror, [a, b, E::Line(s, e)]) => {
            let (s, e) = (*s, *e);
            let refl = |p: P<T>| reflect(p, s, e);
            let diff = |p: P<T>, q: P<T>| [p.x - q.x, p.y - q.y];
            match (*a, *b) {
                (E::Point(p), E::Point(q)) => diff(refl(p), q).to_vec(),
                (E::Line(a1, b1), E::Line(a2, b2)) => {
                    let mut v = diff(refl(a1), a2).to_vec();
                    v.extend(diff(refl(b1), b2));
                    v
                }
                (E::Circle { c: c1, r: r1 }, E::Circle { c: c2, r: r2 }) => {
                    let mut v = diff(refl(c1), c2).to_vec();
                    v.push(r1 - r2);
                    v
                }
                (
                    E::Arc { c: c1, r: r1, start: s1, end: e1 },
                    E::Arc { c: c2, r: r2, start: s2, end: e2 },
                ) => {
                    // reflection reverses orientation: start maps onto end
                    let rc = refl(c1);
                    let mut v = diff(rc, c2).to_vec();
                    v.push(r1 - r2);
                    v.push((refl(s1) - rc).unit().cross((e2 - c2).unit()));
                    v.push((refl(e1) - rc).unit().cross((s2 - c2).unit()));
                    v
                }
                _ => return Err(bad()),
            }
        }
        (K::Radius | K::Diameter, [x]) => match x.round() {
            Some((_, r)) => {
                let target = target_length::<T>(c)?;
                vec![if c.kind == K::Radius { r - target } else { r.scale(2.0) - target }]
            }
            None => return Err(bad()),
        },
        (K::Length, [E::Line(a, b)]) => {
            let target = target_length::<T>(c)?;
            let d = *b - *a;
            let measured = match c.direction.unwrap_or(Direction::Minimum) {
                Direction::Minimum => d.norm(),
                Direction::Vertical => d.y.abs(),
                Direction::Horizontal => d.x.abs(),
            };
            vec![measured - target]
        }
        (K::Distance, [a, b]) => {
            let target = target_length::<T>(c)?;
            match c.direction.unwrap_or(Direction::Minimum) {
                Direction::Minimum => vec![min_distance(c, *a, *b, &classes)? - target],
                dir => match (*a, *b) {
                    (E::Point(p), E::Point(q)) => {
                        let delta = if dir == Direction::Vertical { q.y - p.y } else { q.x - p.x };
                        vec![signed_or_abs(delta, c.half_space0) - target]
                    }
                    _ => return Err(bad()),
                },
            }
        }
        (K::Angle, [E::Line(a1, b1), E::Line(a2, b2)]) => {
            let u = *b1 - *a1;
            let mut v = *b2 - *a2;
            if c.aligned == Some(false) {
                v = P::new(-v.x, -v.y);
            }
            let mut theta = u.cross(v).atan2(u.dot(v));
            if c.clockwise == Some(true) {
                theta = -theta;
            }
            let target = c.angle.ok_or(SolveError::MissingValue { kind: c.kind })?.to_radians();
            vec![wrap_angle(theta - T::cst(target))]
        }
        (K::Offset, [E::Line(a1, b1), E::Line(a2, b2)]) => {
            let u = (*b1 - *a1).unit();
            let v = (*b2 - *a2).unit();
            vec![u.cross(v), (*a2 - *a1).dot(u)]
        }
        _ => return Err(bad()),
    };
    Ok(r)
}

fn min_distance<T: Scalar>(
    c: &Constraint,
    a: Entity<T>,
    b: Entity<T>,
    classes: &[EntityClass],
) -> Result<T, SolveError> {
    use Entity as E;
    Ok(match (a, b) {
        (E::Point(p), E::Point(q)) => (p - q).norm(),
        (E::Point(p), E::Line(s, e)) => signed_or_abs(signed_distance(p, s, e), half_space(c, 0)),
        (E::Line(s, e), E::Point(p)) => signed_or_abs(signed_distance(p, s, e), half_space(c, 1)),
        (E::Point(p), E::Circle { c: o, r } | E::Arc { c: o, r, .. }) => {
            signed_or_abs((p - o).norm() - r, half_space(c, 0))
        }
        (E::Circle { c: o, r } | E::Arc { c: o, r, .. }, E::Point(p)) => {
            signed_or_abs((p - o).norm() - r, half_space(c, 1))
        }
        (E::Line(a1, b1), E::Line(a2, b2)) => signed_or_abs(signed_distance(a2.mid(b2), a1, b1), half_space(c, 1)),
        (E::Line(s, e), E::Circle { c: o, r } | E::Arc { c: o, r, .. })
        | (E::Circle { c: o, r } | E::Arc { c: o, r, .. }, E::Line(s, e)) => signed_distance(o, s, e).abs() - r,
        (x, y) => match (x.round(), y.round()) {
            (Some((c1, r1)), Some((c2, r2))) => (c1 - c2).norm() - r1 - r2,
            _ => return Err(unsupported(c, classes)),
        },
    })
}
