//! Parameter schemata per constraint type.

use thiserror::Error;

use super::constraint::selector_valid;
use super::{Constraint, ConstraintType, Sketch};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SchemaError {
    #[error("{kind} has no schema with parameters {params:?}")]
    UnknownSchema {
        kind: ConstraintType,
        params: Vec<&'static str>,
    },
    #[error("reference {reference} does not resolve")]
    DanglingReference { reference: String },
    #[error("{kind} is missing parameter {param}")]
    MissingParameter {
        kind: ConstraintType,
        param: &'static str,
    },
    #[error("{kind} has unexpected parameter {param}")]
    ExtraParameter {
        kind: ConstraintType,
        param: &'static str,
    },
}

const L1: &[&str] = &["local0"];
const L2: &[&str] = &["local0", "local1"];
const L3: &[&str] = &["local0", "local1", "local2"];
const DIMENSION: &[&str] = &["local0", "length"];
const LENGTH: &[&str] = &["local0", "direction", "length"];
const DISTANCE: &[&str] = &[
    "local0",
    "local1",
    "direction",
    "halfSpace0",
    "halfSpace1",
    "length",
];
const ANGLE: &[&str] = &["local0", "local1", "aligned", "clockwise", "angle"];

/// Every accepted parameter set for a constraint type.
pub fn schemata(kind: ConstraintType) -> &'static [&'static [&'static str]] {
    use ConstraintType::*;
    match kind {
        Horizontal | Vertical => &[L1, L2],
        Coincident | Parallel | Perpendicular | Tangent | Midpoint | Equal | Offset
        | Concentric | Projected => &[L2],
        Mirror => &[L3],
        Diameter | Radius => &[DIMENSION],
        Length => &[LENGTH],
        Distance => &[DISTANCE],
        Angle => &[ANGLE],
    }
}

/// Check a constraint's parameter set against its schemata and resolve every
/// local reference against `sketch`.
pub fn validate_constraint(c: &Constraint, sketch: &Sketch) -> Result<(), SchemaError> {
    check_schema(c)?;
    for local in &c.locals {
        let ok = match sketch.primitive(&local.primitive) {
            Some(p) => local.selector.is_none_or(|sel| selector_valid(p.kind(), sel)),
            None => false,
        };
        if !ok {
            return Err(SchemaError::DanglingReference {
                reference: local.to_string(),
            });
        }
    }
    Ok(())
}

fn check_schema(c: &Constraint) -> Result<(), SchemaError> {
    let present = c.parameter_names();
    let options = schemata(c.kind);
    if options.iter().any(|s| same_set(s, &present)) {
        return Ok(());
    }
    // Diagnose against the schemata with the same number of locals.
    let locals = c.locals.len();
    let n_locals = |s: &[&str]| s.iter().filter(|p| p.starts_with("local")).count();
    let mut best: Option<SchemaError> = None;
    for schema in options.iter().filter(|s| n_locals(s) == locals) {
        let missing = schema.iter().find(|p| !present.contains(p));
        let extra = present.iter().find(|p| !schema.contains(p));
        let err = match (missing, extra) {
            (Some(m), None) => SchemaError::MissingParameter { kind: c.kind, param: m },
            (None, Some(e)) => SchemaError::ExtraParameter { kind: c.kind, param: e },
            _ => continue,
        };
        best.get_or_insert(err);
    }
    Err(best.unwrap_or(SchemaError::UnknownSchema {
        kind: c.kind,
        params: present,
    }))
}

fn same_set(schema: &[&str], present: &[&str]) -> bool {
    schema.len() == present.len() && schema.iter().all(|p| present.contains(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec2;
    use crate::model::{EntityRef, Geometry, Primitive, Selector};
    use crate::units::Length;

    fn sketch() -> Sketch {
        let line = |id: &str| {
            Primitive::from_standard(
                id,
                &crate::model::StandardPrimitive::Line {
                    start: Vec2::new(0.0, 0.0),
                    end: Vec2::new(1.0, 0.0),
                },
            )
            .unwrap()
        };
        Sketch::new(
            "t",
            vec![
                line("l0"),
                line("l1"),
                line("l2"),
                Primitive::new("p", Geometry::Point { x: 0.0, y: 0.0 }),
            ],
            vec![],
        )
    }

    fn r(id: &str) -> EntityRef {
        EntityRef::whole(id)
    }

    #[test]
    fn mirror_three_locals() {
        let c = Constraint::new(ConstraintType::Mirror, vec![r("l0"), r("l1"), r("l2")]);
        assert_eq!(validate_constraint(&c, &sketch()), Ok(()));
    }

    #[test]
    fn radius_without_length() {
        let c = Constraint::new(ConstraintType::Radius, vec![r("l0")]);
        assert_eq!(
            validate_constraint(&c, &sketch()),
            Err(SchemaError::MissingParameter {
                kind: ConstraintType::Radius,
                param: "length"
            })
        );
    }

    #[test]
    fn horizontal_schemata() {
        let s = sketch();
        let h = |locals: Vec<EntityRef>| Constraint::new(ConstraintType::Horizontal, locals);
        assert!(validate_constraint(&h(vec![r("l0")]), &s).is_ok());
        assert!(validate_constraint(&h(vec![r("l0"), r("l1")]), &s).is_ok());
        assert!(matches!(
            validate_constraint(&h(vec![r("l0"), r("l1"), r("l2")]), &s),
            Err(SchemaError::UnknownSchema { .. })
        ));
    }

    #[test]
    fn extra_parameter() {
        let c = Constraint::new(ConstraintType::Parallel, vec![r("l0"), r("l1")])
            .with_length(Length::mm(1.0));
        assert_eq!(
            validate_constraint(&c, &sketch()),
            Err(SchemaError::ExtraParameter {
                kind: ConstraintType::Parallel,
                param: "length"
            })
        );
    }

    #[test]
    fn dangling_references() {
        let s = sketch();
        let c = Constraint::new(ConstraintType::Parallel, vec![r("l0"), r("nope")]);
        assert!(matches!(
            validate_constraint(&c, &s),
            Err(SchemaError::DanglingReference { .. })
        ));
        // points have no sub-primitives; lines have no center
        for bad in [EntityRef::sub("p", Selector::Start), EntityRef::sub("l0", Selector::Center)] {
            let c = Constraint::new(ConstraintType::Coincident, vec![bad, r("l1")]);
            assert!(matches!(
                validate_constraint(&c, &s),
                Err(SchemaError::DanglingReference { .. })
            ));
        }
    }
}
