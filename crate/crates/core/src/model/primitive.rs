use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde_json::{Map, Value};

use super::ModelError;
use crate::geom::{BBox, Vec2};

/// Tolerance on the norm of stored unit direction vectors.
pub const UNIT_TOLERANCE: f64 = 1e-9;
/// Tolerance used by [`to_standard`] before rejecting a direction.
pub const CONVERSION_UNIT_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimitiveType {
    Point,
    Line,
    Circle,
    Arc,
    Ellipse,
    Spline,
}

impl PrimitiveType {
    pub const ALL: [PrimitiveType; 6] = [
        PrimitiveType::Point,
        PrimitiveType::Line,
        PrimitiveType::Circle,
        PrimitiveType::Arc,
        PrimitiveType::Ellipse,
        PrimitiveType::Spline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrimitiveType::Point => "Point",
            PrimitiveType::Line => "Line",
            PrimitiveType::Circle => "Circle",
            PrimitiveType::Arc => "Arc",
            PrimitiveType::Ellipse => "Ellipse",
            PrimitiveType::Spline => "Spline",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Sub-primitives that constraints may reference, in node-creation order.
    pub fn sub_selectors(self) -> &'static [Selector] {
        match self {
            PrimitiveType::Line => &[Selector::Start, Selector::End],
            PrimitiveType::Arc => &[Selector::Start, Selector::End, Selector::Center],
            PrimitiveType::Circle | PrimitiveType::Ellipse => &[Selector::Center],
            PrimitiveType::Point | PrimitiveType::Spline => &[],
        }
    }

    /// Types the numeric solver can move.
    pub fn is_solver_supported(self) -> bool {
        matches!(
            self,
            PrimitiveType::Point | PrimitiveType::Line | PrimitiveType::Circle | PrimitiveType::Arc
        )
    }
}

impl fmt::Display for PrimitiveType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PrimitiveType {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, ModelError> {
        PrimitiveType::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| ModelError::UnknownPrimitiveType(s.to_string()))
    }
}

/// Degrees of freedom of a primitive type. Splines have no fixed count; use
/// [`Primitive::dof`] which counts two per control point.
pub fn dof_of_primitive(kind: PrimitiveType) -> usize {
    match kind {
        PrimitiveType::Point => 2,
        PrimitiveType::Line => 4,
        PrimitiveType::Circle => 3,
        PrimitiveType::Arc => 5,
        PrimitiveType::Ellipse => 5,
        PrimitiveType::Spline => 0,
    }
}

/// A referenceable part of a primitive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Selector {
    Start,
    End,
    Center,
}

impl Selector {
    pub fn name(self) -> &'static str {
        match self {
            Selector::Start => "start",
            Selector::End => "end",
            Selector::Center => "center",
        }
    }

    pub fn parse(s: &str) -> Option<Selector> {
        match s {
            "start" => Some(Selector::Start),
            "end" => Some(Selector::End),
            "center" => Some(Selector::Center),
            _ => None,
        }
    }
}

/// Onshape-style overparameterized geometry.
#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    Point {
        x: f64,
        y: f64,
    },
    Line {
        dir_x: f64,
        dir_y: f64,
        pnt_x: f64,
        pnt_y: f64,
        start_param: f64,
        end_param: f64,
    },
    Circle {
        x_center: f64,
        y_center: f64,
        x_dir: f64,
        y_dir: f64,
        radius: f64,
        clockwise: bool,
    },
    Arc {
        x_center: f64,
        y_center: f64,
        x_dir: f64,
        y_dir: f64,
        radius: f64,
        clockwise: bool,
        start_param: f64,
        end_param: f64,
    },
    Ellipse {
        x_center: f64,
        y_center: f64,
        x_dir: f64,
        y_dir: f64,
        radius: f64,
        minor_radius: f64,
        clockwise: bool,
    },
    Spline {
        control_points: Vec<Vec2>,
    },
}

impl Geometry {
    /// Radius of circles and arcs.
    pub fn radius(&self) -> Option<f64> {
        match *self {
            Geometry::Circle { radius, .. } | Geometry::Arc { radius, .. } => Some(radius),
            _ => None,
        }
    }

    pub fn kind(&self) -> PrimitiveType {
        match self {
            Geometry::Point { .. } => PrimitiveType::Point,
            Geometry::Line { .. } => PrimitiveType::Line,
            Geometry::Circle { .. } => PrimitiveType::Circle,
            Geometry::Arc { .. } => PrimitiveType::Arc,
            Geometry::Ellipse { .. } => PrimitiveType::Ellipse,
            Geometry::Spline { .. } => PrimitiveType::Spline,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Primitive {
    pub id: String,
    pub is_construction: bool,
    pub geometry: Geometry,
    /// Unrecognized record fields, preserved in order.
    pub extra: Map<String, Value>,
}

impl Primitive {
    pub fn new(id: impl Into<String>, geometry: Geometry) -> Self {
        Primitive {
            id: id.into(),
            is_construction: false,
            geometry,
            extra: Map::new(),
        }
    }

    pub fn construction(mut self, flag: bool) -> Self {
        self.is_construction = flag;
        self
    }

    pub fn from_standard(id: impl Into<String>, s: &StandardPrimitive) -> Result<Self, ModelError> {
        Ok(Primitive::new(id, from_standard(s)?))
    }

    pub fn kind(&self) -> PrimitiveType {
        self.geometry.kind()
    }

    pub fn dof(&self) -> usize {
        match &self.geometry {
            Geometry::Spline { control_points } => 2 * control_points.len(),
            g => dof_of_primitive(g.kind()),
        }
    }

    /// Check the stored-value invariants.
    pub fn validate(&self) -> Result<(), ModelError> {
        let unit = |x: f64, y: f64| -> Result<(), ModelError> {
            let n = x.hypot(y);
            if !n.is_finite() || (n - 1.0).abs() > UNIT_TOLERANCE {
                return Err(ModelError::NonUnitDirection { norm: n });
            }
            Ok(())
        };
        let finite = |vals: &[f64]| -> Result<(), ModelError> {
            if vals.iter().all(|v| v.is_finite()) {
                Ok(())
            } else {
                Err(ModelError::NonFinite)
            }
        };
        match &self.geometry {
            Geometry::Point { x, y } => finite(&[*x, *y]),
            Geometry::Line {
                dir_x,
                dir_y,
                pnt_x,
                pnt_y,
                start_param,
                end_param,
            } => {
                finite(&[*pnt_x, *pnt_y, *start_param, *end_param])?;
                unit(*dir_x, *dir_y)?;
                if start_param == end_param {
                    return Err(ModelError::DegenerateGeometry("zero-length line"));
                }
                Ok(())
            }
            Geometry::Circle {
                x_center,
                y_center,
                x_dir,
                y_dir,
                radius,
                ..
            } => {
                finite(&[*x_center, *y_center, *radius])?;
                unit(*x_dir, *y_dir)?;
                positive_radius(*radius)
            }
            Geometry::Arc {
                x_center,
                y_center,
                x_dir,
                y_dir,
                radius,
                start_param,
                end_param,
                ..
            } => {
                finite(&[*x_center, *y_center, *radius, *start_param, *end_param])?;
                unit(*x_dir, *y_dir)?;
                positive_radius(*radius)
            }
            Geometry::Ellipse {
                x_center,
                y_center,
                x_dir,
                y_dir,
                radius,
                minor_radius,
                ..
            } => {
                finite(&[*x_center, *y_center, *radius, *minor_radius])?;
                unit(*x_dir, *y_dir)?;
                positive_radius(*radius)?;
                positive_radius(*minor_radius)?;
                if minor_radius > radius {
                    return Err(ModelError::DegenerateGeometry("minor radius exceeds major radius"));
                }
                Ok(())
            }
            Geometry::Spline { control_points } => {
                let flat: Vec<f64> = control_points.iter().flat_map(|p| [p.x, p.y]).collect();
                finite(&flat)
            }
        }
    }

    pub fn to_standard(&self) -> Result<StandardPrimitive, ModelError> {
        to_standard(&self.geometry)
    }

    /// Position of a sub-primitive, if the selector applies to this type.
    pub fn sub_point(&self, sel: Selector) -> Option<Vec2> {
        match (self.to_standard().ok()?, sel) {
            (StandardPrimitive::Line { start, .. }, Selector::Start) => Some(start),
            (StandardPrimitive::Line { end, .. }, Selector::End) => Some(end),
            (StandardPrimitive::Arc { start, .. }, Selector::Start) => Some(start),
            (StandardPrimitive::Arc { end, .. }, Selector::End) => Some(end),
            (StandardPrimitive::Arc { center, .. }, Selector::Center)
            | (StandardPrimitive::Circle { center, .. }, Selector::Center)
            | (StandardPrimitive::Ellipse { center, .. }, Selector::Center) => Some(center),
            _ => None,
        }
    }

    pub fn bbox(&self) -> BBox {
        let mut b = BBox::empty();
        let Ok(std) = self.to_standard() else {
            return b;
        };
        match std {
            StandardPrimitive::Point(p) => b.include(p),
            StandardPrimitive::Line { start, end } => {
                b.include(start);
                b.include(end);
            }
            StandardPrimitive::Circle { center, radius } => {
                b.include(center - Vec2::new(radius, radius));
                b.include(center + Vec2::new(radius, radius));
            }
            StandardPrimitive::Arc { .. } => {
                let (center, radius, a0, sweep) = arc_angles(&self.geometry).expect("arc geometry");
                b.include(center + Vec2::from_angle(a0) * radius);
                b.include(center + Vec2::from_angle(a0 + sweep) * radius);
                // axis extremes crossed by the sweep
                let (lo, hi) = if sweep >= 0.0 { (a0, a0 + sweep) } else { (a0 + sweep, a0) };
                let mut k = (lo / std::f64::consts::FRAC_PI_2).ceil();
                while k * std::f64::consts::FRAC_PI_2 <= hi {
                    b.include(center + Vec2::from_angle(k * std::f64::consts::FRAC_PI_2) * radius);
                    k += 1.0;
                }
            }
            StandardPrimitive::Ellipse {
                center,
                major_dir,
                radius,
                minor_radius,
            } => {
                let (c, s) = (major_dir.x, major_dir.y);
                let hx = ((radius * c).powi(2) + (minor_radius * s).powi(2)).sqrt();
                let hy = ((radius * s).powi(2) + (minor_radius * c).powi(2)).sqrt();
                b.include(center - Vec2::new(hx, hy));
                b.include(center + Vec2::new(hx, hy));
            }
            StandardPrimitive::Spline { control_points } => {
                for p in control_points {
                    b.include(p);
                }
            }
        }
        b
    }
}

fn positive_radius(r: f64) -> Result<(), ModelError> {
    if r > 0.0 {
        Ok(())
    } else {
        Err(ModelError::DegenerateGeometry("non-positive radius"))
    }
}

/// Minimal parameterization of a primitive.
#[derive(Clone, Debug, PartialEq)]
pub enum StandardPrimitive {
    Point(Vec2),
    Line {
        start: Vec2,
        end: Vec2,
    },
    Circle {
        center: Vec2,
        radius: f64,
    },
    /// Traversed from `start` to `end`, clockwise when the flag is set.
    Arc {
        center: Vec2,
        radius: f64,
        start: Vec2,
        end: Vec2,
        clockwise: bool,
    },
    Ellipse {
        center: Vec2,
        major_dir: Vec2,
        radius: f64,
        minor_radius: f64,
    },
    Spline {
        control_points: Vec<Vec2>,
    },
}

impl StandardPrimitive {
    pub fn kind(&self) -> PrimitiveType {
        match self {
            StandardPrimitive::Point(_) => PrimitiveType::Point,
            StandardPrimitive::Line { .. } => PrimitiveType::Line,
            StandardPrimitive::Circle { .. } => PrimitiveType::Circle,
            StandardPrimitive::Arc { .. } => PrimitiveType::Arc,
            StandardPrimitive::Ellipse { .. } => PrimitiveType::Ellipse,
            StandardPrimitive::Spline { .. } => PrimitiveType::Spline,
        }
    }

    pub fn dof(&self) -> usize {
        match self {
            StandardPrimitive::Spline { control_points } => 2 * control_points.len(),
            s => dof_of_primitive(s.kind()),
        }
    }

    /// Rigidly moved by `d`.
    pub fn translated(&self, d: Vec2) -> StandardPrimitive {
        use StandardPrimitive as S;
        match self.clone() {
            S::Point(p) => S::Point(p + d),
            S::Line { start, end } => S::Line {
                start: start + d,
                end: end + d,
            },
            S::Circle { center, radius } => S::Circle {
                center: center + d,
                radius,
            },
            S::Arc {
                center,
                radius,
                start,
                end,
                clockwise,
            } => S::Arc {
                center: center + d,
                radius,
                start: start + d,
                end: end + d,
                clockwise,
            },
            S::Ellipse {
                center,
                major_dir,
                radius,
                minor_radius,
            } => S::Ellipse {
                center: center + d,
                major_dir,
                radius,
                minor_radius,
            },
            S::Spline { control_points } => S::Spline {
                control_points: control_points.into_iter().map(|p| p + d).collect(),
            },
        }
    }

    /// Largest absolute coordinate difference against another standard
    /// primitive of the same type; `None` when the types differ.
    pub fn max_abs_diff(&self, other: &StandardPrimitive) -> Option<f64> {
        use StandardPrimitive as S;
        let d = |a: Vec2, b: Vec2| (a.x - b.x).abs().max((a.y - b.y).abs());
        Some(match (self, other) {
            (S::Point(a), S::Point(b)) => d(*a, *b),
            (S::Line { start: a0, end: a1 }, S::Line { start: b0, end: b1 }) => d(*a0, *b0).max(d(*a1, *b1)),
            (S::Circle { center: a, radius: r }, S::Circle { center: b, radius: q }) => d(*a, *b).max((r - q).abs()),
            (
                S::Arc { center: a, radius: r, start: a0, end: a1, clockwise: c },
                S::Arc { center: b, radius: q, start: b0, end: b1, clockwise: k },
            ) => {
                if c != k {
                    return Some(f64::INFINITY);
                }
                d(*a, *b).max((r - q).abs()).max(d(*a0, *b0)).max(d(*a1, *b1))
            }
            (
                S::Ellipse { center: a, major_dir: u, radius: r, minor_radius: m },
                S::Ellipse { center: b, major_dir: v, radius: q, minor_radius: n },
            ) => d(*a, *b).max(d(*u, *v)).max((r - q).abs()).max((m - n).abs()),
            (S::Spline { control_points: a }, S::Spline { control_points: b }) => {
                if a.len() != b.len() {
                    return Some(f64::INFINITY);
                }
                a.iter().zip(b).map(|(p, q)| d(*p, *q)).fold(0.0, f64::max)
            }
            _ => return None,
        })
    }
}

fn check_unit(x: f64, y: f64) -> Result<Vec2, ModelError> {
    let n = x.hypot(y);
    if !n.is_finite() || (n - 1.0).abs() > CONVERSION_UNIT_TOLERANCE {
        return Err(ModelError::NonUnitDirection { norm: n });
    }
    Ok(Vec2::new(x, y))
}

/// Sense multiplier for angular parameters: +1 counter-clockwise, -1 clockwise.
pub fn angular_sense(clockwise: bool) -> f64 {
    if clockwise {
        -1.0
    } else {
        1.0
    }
}

/// `(center, radius, world start angle, signed world sweep)` of an arc.
pub fn arc_angles(g: &Geometry) -> Option<(Vec2, f64, f64, f64)> {
    match *g {
        Geometry::Arc {
            x_center,
            y_center,
            x_dir,
            y_dir,
            radius,
            clockwise,
            start_param,
            end_param,
        } => {
            let s = angular_sense(clockwise);
            let base = y_dir.atan2(x_dir);
            Some((
                Vec2::new(x_center, y_center),
                radius,
                base + s * start_param,
                s * (end_param - start_param),
            ))
        }
        _ => None,
    }
}

/// Convert overparameterized geometry to its minimal form.
///
/// Arc angles are measured from the stored direction vector, counter-clockwise
/// unless `clockwise` is set, in which case the sense is reversed.
pub fn to_standard(g: &Geometry) -> Result<StandardPrimitive, ModelError> {
    Ok(match g {
        Geometry::Point { x, y } => StandardPrimitive::Point(Vec2::new(*x, *y)),
        Geometry::Line {
            dir_x,
            dir_y,
            pnt_x,
            pnt_y,
            start_param,
            end_param,
        } => {
            let dir = check_unit(*dir_x, *dir_y)?;
            let pnt = Vec2::new(*pnt_x, *pnt_y);
            StandardPrimitive::Line {
                start: pnt + dir * *start_param,
                end: pnt + dir * *end_param,
            }
        }
        Geometry::Circle {
            x_center,
            y_center,
            x_dir,
            y_dir,
            radius,
            ..
        } => {
            check_unit(*x_dir, *y_dir)?;
            StandardPrimitive::Circle {
                center: Vec2::new(*x_center, *y_center),
                radius: *radius,
            }
        }
        Geometry::Arc {
            x_center,
            y_center,
            x_dir,
            y_dir,
            radius,
            clockwise,
            start_param,
            end_param,
        } => {
            let dir = check_unit(*x_dir, *y_dir)?;
            let s = angular_sense(*clockwise);
            let center = Vec2::new(*x_center, *y_center);
            StandardPrimitive::Arc {
                center,
                radius: *radius,
                start: center + dir.rotate(s * start_param) * *radius,
                end: center + dir.rotate(s * end_param) * *radius,
                clockwise: *clockwise,
            }
        }
        Geometry::Ellipse {
            x_center,
            y_center,
            x_dir,
            y_dir,
            radius,
            minor_radius,
            ..
        } => StandardPrimitive::Ellipse {
            center: Vec2::new(*x_center, *y_center),
            major_dir: check_unit(*x_dir, *y_dir)?,
            radius: *radius,
            minor_radius: *minor_radius,
        },
        Geometry::Spline { control_points } => StandardPrimitive::Spline {
            control_points: control_points.clone(),
        },
    })
}

/// Canonical overparameterization of a standard primitive: lines anchor at
/// their start with `startParam = 0`; circles and arcs use direction (1, 0).
pub fn from_standard(s: &StandardPrimitive) -> Result<Geometry, ModelError> {
    Ok(match s {
        StandardPrimitive::Point(p) => Geometry::Point { x: p.x, y: p.y },
        StandardPrimitive::Line { start, end } => {
            let d = *end - *start;
            let len = d.norm();
            let dir = d
                .normalized()
                .filter(|_| len > 0.0)
                .ok_or(ModelError::DegenerateGeometry("zero-length line"))?;
            Geometry::Line {
                dir_x: dir.x,
                dir_y: dir.y,
                pnt_x: start.x,
                pnt_y: start.y,
                start_param: 0.0,
                end_param: len,
            }
        }
        StandardPrimitive::Circle { center, radius } => {
            positive_radius(*radius)?;
            Geometry::Circle {
                x_center: center.x,
                y_center: center.y,
                x_dir: 1.0,
                y_dir: 0.0,
                radius: *radius,
                clockwise: false,
            }
        }
        StandardPrimitive::Arc {
            center,
            radius,
            start,
            end,
            clockwise,
        } => {
            positive_radius(*radius)?;
            let s = angular_sense(*clockwise);
            let a_start = (*start - *center).angle();
            let a_end = (*end - *center).angle();
            let mut sweep = (s * (a_end - a_start)).rem_euclid(TAU);
            if sweep == 0.0 {
                sweep = TAU;
            }
            let start_param = s * a_start;
            Geometry::Arc {
                x_center: center.x,
                y_center: center.y,
                x_dir: 1.0,
                y_dir: 0.0,
                radius: *radius,
                clockwise: *clockwise,
                start_param,
                end_param: start_param + sweep,
            }
        }
        StandardPrimitive::Ellipse {
            center,
            major_dir,
            radius,
            minor_radius,
        } => {
            positive_radius(*radius)?;
            positive_radius(*minor_radius)?;
            let dir = major_dir
                .normalized()
                .ok_or(ModelError::DegenerateGeometry("zero major axis"))?;
            Geometry::Ellipse {
                x_center: center.x,
                y_center: center.y,
                x_dir: dir.x,
                y_dir: dir.y,
                radius: *radius,
                minor_radius: *minor_radius,
                clockwise: false,
            }
        }
        StandardPrimitive::Spline { control_points } => Geometry::Spline {
            control_points: control_points.clone(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn close(a: Vec2, b: Vec2) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn dof_table() {
        assert_eq!(dof_of_primitive(PrimitiveType::Point), 2);
        assert_eq!(dof_of_primitive(PrimitiveType::Line), 4);
        assert_eq!(dof_of_primitive(PrimitiveType::Circle), 3);
        assert_eq!(dof_of_primitive(PrimitiveType::Arc), 5);
        assert_eq!(dof_of_primitive(PrimitiveType::Ellipse), 5);
        let spline = Primitive::new(
            "s",
            Geometry::Spline {
                control_points: vec![Vec2::ZERO; 4],
            },
        );
        assert_eq!(spline.dof(), 8);
    }

    #[test]
    fn line_identity() {
        let g = Geometry::Line {
            dir_x: 1.0,
            dir_y: 0.0,
            pnt_x: 0.0,
            pnt_y: 0.0,
            start_param: 0.0,
            end_param: 1.0,
        };
        assert_eq!(
            to_standard(&g).unwrap(),
            StandardPrimitive::Line {
                start: Vec2::new(0.0, 0.0),
                end: Vec2::new(1.0, 0.0)
            }
        );
    }

    #[test]
    fn line_with_offset_params() {
        let g = Geometry::Line {
            dir_x: 0.0,
            dir_y: 1.0,
            pnt_x: 2.0,
            pnt_y: 3.0,
            start_param: -1.0,
            end_param: 2.0,
        };
        let StandardPrimitive::Line { start, end } = to_standard(&g).unwrap() else {
            panic!()
        };
        assert!(close(start, Vec2::new(2.0, 2.0)));
        assert!(close(end, Vec2::new(2.0, 5.0)));
    }

    #[test]
    fn arc_quarter_ccw() {
        let g = Geometry::Arc {
            x_center: 0.0,
            y_center: 0.0,
            x_dir: 1.0,
            y_dir: 0.0,
            radius: 1.0,
            clockwise: false,
            start_param: 0.0,
            end_param: FRAC_PI_2,
        };
        let StandardPrimitive::Arc { start, end, .. } = to_standard(&g).unwrap() else {
            panic!()
        };
        assert!(close(start, Vec2::new(1.0, 0.0)));
        assert!(close(end, Vec2::new(0.0, 1.0)));
    }

    #[test]
    fn arc_clockwise_reverses_sense() {
        let g = Geometry::Arc {
            x_center: 0.0,
            y_center: 0.0,
            x_dir: 1.0,
            y_dir: 0.0,
            radius: 1.0,
            clockwise: true,
            start_param: 0.0,
            end_param: FRAC_PI_2,
        };
        let StandardPrimitive::Arc { end, .. } = to_standard(&g).unwrap() else {
            panic!()
        };
        assert!(close(end, Vec2::new(0.0, -1.0)));
    }

    #[test]
    fn canonical_choices() {
        let line = from_standard(&StandardPrimitive::Line {
            start: Vec2::new(0.0, 0.0),
            end: Vec2::new(1.0, 0.0),
        })
        .unwrap();
        assert_eq!(
            line,
            Geometry::Line {
                dir_x: 1.0,
                dir_y: 0.0,
                pnt_x: 0.0,
                pnt_y: 0.0,
                start_param: 0.0,
                end_param: 1.0
            }
        );
        let circle = from_standard(&StandardPrimitive::Circle {
            center: Vec2::new(1.0, 1.0),
            radius: 2.0,
        })
        .unwrap();
        assert_eq!(
            circle,
            Geometry::Circle {
                x_center: 1.0,
                y_center: 1.0,
                x_dir: 1.0,
                y_dir: 0.0,
                radius: 2.0,
                clockwise: false
            }
        );
    }

    #[test]
    fn degenerate_inputs_rejected() {
        let p = Vec2::new(1.0, 1.0);
        assert!(matches!(
            from_standard(&StandardPrimitive::Line { start: p, end: p }),
            Err(ModelError::DegenerateGeometry(_))
        ));
        assert!(matches!(
            from_standard(&StandardPrimitive::Circle { center: p, radius: 0.0 }),
            Err(ModelError::DegenerateGeometry(_))
        ));
        let skewed = Geometry::Line {
            dir_x: 1.0,
            dir_y: 0.1,
            pnt_x: 0.0,
            pnt_y: 0.0,
            start_param: 0.0,
            end_param: 1.0,
        };
        assert!(matches!(to_standard(&skewed), Err(ModelError::NonUnitDirection { .. })));
        let zero_len = Primitive::new(
            "l",
            Geometry::Line {
                dir_x: 1.0,
                dir_y: 0.0,
                pnt_x: 0.0,
                pnt_y: 0.0,
                start_param: 2.0,
                end_param: 2.0,
            },
        );
        assert!(zero_len.validate().is_err());
    }

    #[test]
    fn arc_bbox_includes_axis_extremes() {
        let g = Geometry::Arc {
            x_center: 0.0,
            y_center: 0.0,
            x_dir: 1.0,
            y_dir: 0.0,
            radius: 2.0,
            clockwise: false,
            start_param: -0.5,
            end_param: 0.5,
        };
        let b = Primitive::new("a", g).bbox();
        assert!((b.max.x - 2.0).abs() < 1e-12);
        assert!((b.max.y - 2.0 * 0.5f64.sin()).abs() < 1e-12);
    }
}
