use std::fmt;
use std::str::FromStr;

use serde_json::{Map, Value};

use super::{ModelError, PrimitiveType, Selector};
use crate::units::Length;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintType {
    Coincident,
    Horizontal,
    Vertical,
    Parallel,
    Perpendicular,
    Tangent,
    Midpoint,
    Equal,
    Offset,
    Concentric,
    Mirror,
    Diameter,
    Radius,
    Length,
    Distance,
    Angle,
    /// External reference to projected geometry. Parsed, never solved.
    Projected,
}

impl ConstraintType {
    pub const ALL: [ConstraintType; 17] = [
        ConstraintType::Coincident,
        ConstraintType::Horizontal,
        ConstraintType::Vertical,
        ConstraintType::Parallel,
        ConstraintType::Perpendicular,
        ConstraintType::Tangent,
        ConstraintType::Midpoint,
        ConstraintType::Equal,
        ConstraintType::Offset,
        ConstraintType::Concentric,
        ConstraintType::Mirror,
        ConstraintType::Diameter,
        ConstraintType::Radius,
        ConstraintType::Length,
        ConstraintType::Distance,
        ConstraintType::Angle,
        ConstraintType::Projected,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstraintType::Coincident => "Coincident",
            ConstraintType::Horizontal => "Horizontal",
            ConstraintType::Vertical => "Vertical",
            ConstraintType::Parallel => "Parallel",
            ConstraintType::Perpendicular => "Perpendicular",
            ConstraintType::Tangent => "Tangent",
            ConstraintType::Midpoint => "Midpoint",
            ConstraintType::Equal => "Equal",
            ConstraintType::Offset => "Offset",
            ConstraintType::Concentric => "Concentric",
            ConstraintType::Mirror => "Mirror",
            ConstraintType::Diameter => "Diameter",
            ConstraintType::Radius => "Radius",
            ConstraintType::Length => "Length",
            ConstraintType::Distance => "Distance",
            ConstraintType::Angle => "Angle",
            ConstraintType::Projected => "Projected",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_external(self) -> bool {
        self == ConstraintType::Projected
    }
}

impl fmt::Display for ConstraintType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstraintType {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, ModelError> {
        ConstraintType::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| ModelError::UnknownConstraintType(s.to_string()))
    }
}

/// Reference to a primitive, or to one of its sub-primitives.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EntityRef {
    pub primitive: String,
    pub selector: Option<Selector>,
}

impl EntityRef {
    pub fn whole(primitive: impl Into<String>) -> Self {
        EntityRef {
            primitive: primitive.into(),
            selector: None,
        }
    }

    pub fn sub(primitive: impl Into<String>, selector: Selector) -> Self {
        EntityRef {
            primitive: primitive.into(),
            selector: Some(selector),
        }
    }

    /// Parses `"id"` or `"id.start"`; a suffix that is not a selector name
    /// is kept as part of the id.
    pub fn parse(s: &str) -> Self {
        if let Some((head, tail)) = s.rsplit_once('.') {
            if let Some(sel) = Selector::parse(tail) {
                return EntityRef::sub(head, sel);
            }
        }
        EntityRef::whole(s)
    }
}

impl fmt::Display for EntityRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.selector {
            Some(sel) => write!(f, "{}.{}", self.primitive, sel.name()),
            None => f.write_str(&self.primitive),
        }
    }
}

/// Measurement type of a distance-like value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Minimum,
    Vertical,
    Horizontal,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::Minimum, Direction::Vertical, Direction::Horizontal];

    pub fn name(self) -> &'static str {
        match self {
            Direction::Minimum => "minimum",
            Direction::Vertical => "vertical",
            Direction::Horizontal => "horizontal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Direction::ALL.into_iter().find(|d| d.name() == s)
    }
}

/// Side of an oriented reference entity. `Left` is the positive side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HalfSpace {
    Left,
    Right,
}

impl HalfSpace {
    pub fn name(self) -> &'static str {
        match self {
            HalfSpace::Left => "left",
            HalfSpace::Right => "right",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "left" => Some(HalfSpace::Left),
            "right" => Some(HalfSpace::Right),
            _ => None,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            HalfSpace::Left => 1.0,
            HalfSpace::Right => -1.0,
        }
    }

    pub fn from_sign(v: f64) -> Self {
        if v >= 0.0 {
            HalfSpace::Left
        } else {
            HalfSpace::Right
        }
    }
}

/// Whether a constraint came from a data set or from inference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    Predicted,
    GroundTruth,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Predicted => "predicted",
            Provenance::GroundTruth => "ground_truth",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "predicted" => Some(Provenance::Predicted),
            "ground_truth" => Some(Provenance::GroundTruth),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub kind: ConstraintType,
    pub locals: Vec<EntityRef>,
    pub length: Option<Length>,
    /// Degrees.
    pub angle: Option<f64>,
    pub clockwise: Option<bool>,
    pub aligned: Option<bool>,
    pub direction: Option<Direction>,
    pub half_space0: Option<HalfSpace>,
    pub half_space1: Option<HalfSpace>,
    pub provenance: Option<Provenance>,
    pub extra: Map<String, Value>,
}

impl Constraint {
    pub fn new(kind: ConstraintType, locals: Vec<EntityRef>) -> Self {
        Constraint {
            kind,
            locals,
            length: None,
            angle: None,
            clockwise: None,
            aligned: None,
            direction: None,
            half_space0: None,
            half_space1: None,
            provenance: None,
            extra: Map::new(),
        }
    }

    pub fn with_length(mut self, length: Length) -> Self {
        self.length = Some(length);
        self
    }

    pub fn with_direction(mut self, direction: Direction) -> Self {
        self.direction = Some(direction);
        self
    }

    pub fn with_half_spaces(mut self, h0: HalfSpace, h1: HalfSpace) -> Self {
        self.half_space0 = Some(h0);
        self.half_space1 = Some(h1);
        self
    }

    pub fn with_angle(mut self, degrees: f64, aligned: bool, clockwise: bool) -> Self {
        self.angle = Some(degrees);
        self.aligned = Some(aligned);
        self.clockwise = Some(clockwise);
        self
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    /// `Radius(r, length)` etc.
    pub fn dimension(kind: ConstraintType, target: EntityRef, length: Length) -> Self {
        Constraint::new(kind, vec![target]).with_length(length)
    }

    /// `Length(line, minimum, length)`.
    pub fn line_length(line: EntityRef, length: Length) -> Self {
        Constraint::new(ConstraintType::Length, vec![line])
            .with_direction(Direction::Minimum)
            .with_length(length)
    }

    /// `Distance(a, b, minimum, left, left, length)`.
    pub fn distance(a: EntityRef, b: EntityRef, length: Length) -> Self {
        Constraint::new(ConstraintType::Distance, vec![a, b])
            .with_direction(Direction::Minimum)
            .with_half_spaces(HalfSpace::Left, HalfSpace::Left)
            .with_length(length)
    }

    pub fn pair(kind: ConstraintType, a: EntityRef, b: EntityRef) -> Self {
        Constraint::new(kind, vec![a, b])
    }

    /// The set of parameter names present, locals included.
    pub fn parameter_names(&self) -> Vec<&'static str> {
        let mut names = Vec::new();
        for i in 0..self.locals.len() {
            names.push(local_name(i));
        }
        let opt = [
            (self.length.is_some(), "length"),
            (self.angle.is_some(), "angle"),
            (self.clockwise.is_some(), "clockwise"),
            (self.aligned.is_some(), "aligned"),
            (self.direction.is_some(), "direction"),
            (self.half_space0.is_some(), "halfSpace0"),
            (self.half_space1.is_some(), "halfSpace1"),
        ];
        names.extend(opt.iter().filter(|(p, _)| *p).map(|(_, n)| *n));
        names
    }
}

pub(crate) fn local_name(i: usize) -> &'static str {
    const NAMES: [&str; 8] = [
        "local0", "local1", "local2", "local3", "local4", "local5", "local6", "local7",
    ];
    NAMES.get(i).copied().unwrap_or("local#")
}

/// Whether a selector is meaningful for a primitive type.
pub fn selector_valid(kind: PrimitiveType, sel: Selector) -> bool {
    kind.sub_selectors().contains(&sel)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entity_ref_parsing() {
        assert_eq!(EntityRef::parse("a.start"), EntityRef::sub("a", Selector::Start));
        assert_eq!(EntityRef::parse("a"), EntityRef::whole("a"));
        assert_eq!(EntityRef::parse("a.b"), EntityRef::whole("a.b"));
        assert_eq!(EntityRef::parse("x.y.center").to_string(), "x.y.center");
    }

    #[test]
    fn names_round_trip() {
        for t in ConstraintType::ALL {
            assert_eq!(t.name().parse::<ConstraintType>().unwrap(), t);
        }
    }
}
