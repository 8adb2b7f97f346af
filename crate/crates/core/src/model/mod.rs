//! Sketch domain types: primitives, constraints and their schemata.

mod constraint;
mod primitive;
mod schema;

use std::collections::HashMap;

use serde_json::{Map, Value};
use thiserror::Error;

pub use constraint::{
    selector_valid, Constraint, ConstraintType, Direction, EntityRef, HalfSpace, Provenance,
};
pub use primitive::{
    angular_sense, arc_angles, dof_of_primitive, from_standard, to_standard, Geometry, Primitive,
    PrimitiveType, Selector, StandardPrimitive, CONVERSION_UNIT_TOLERANCE, UNIT_TOLERANCE,
};
pub use schema::{schemata, validate_constraint, SchemaError};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("direction vector has norm {norm}, expected 1")]
    NonUnitDirection { norm: f64 },
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("unknown primitive type {0:?}")]
    UnknownPrimitiveType(String),
    #[error("unknown constraint type {0:?}")]
    UnknownConstraintType(String),
    #[error("duplicate primitive id {0:?}")]
    DuplicatePrimitive(String),
}

/// A 2D sketch: primitives in user insertion order and constraints in their
/// standalone order.
#[derive(Clone, Debug, PartialEq)]
pub struct Sketch {
    pub id: String,
    pub primitives: Vec<Primitive>,
    pub constraints: Vec<Constraint>,
    pub extra: Map<String, Value>,
}

impl Sketch {
    pub fn new(id: impl Into<String>, primitives: Vec<Primitive>, constraints: Vec<Constraint>) -> Self {
        Sketch {
            id: id.into(),
            primitives,
            constraints,
            extra: Map::new(),
        }
    }

    pub fn primitive(&self, id: &str) -> Option<&Primitive> {
        self.primitives.iter().find(|p| p.id == id)
    }

    pub fn primitive_index(&self, id: &str) -> Option<usize> {
        self.primitives.iter().position(|p| p.id == id)
    }

    /// Map from primitive id to its insertion index.
    pub fn index_map(&self) -> HashMap<&str, usize> {
        self.primitives
            .iter()
            .enumerate()
            .map(|(i, p)| (p.id.as_str(), i))
            .collect()
    }

    /// Validate primitive invariants, id uniqueness and every constraint.
    pub fn validate(&self) -> Result<(), SketchError> {
        let mut seen = HashMap::new();
        for (i, p) in self.primitives.iter().enumerate() {
            if seen.insert(p.id.as_str(), i).is_some() {
                return Err(SketchError::Model(ModelError::DuplicatePrimitive(p.id.clone())));
            }
            p.validate().map_err(SketchError::Model)?;
        }
        for (i, c) in self.constraints.iter().enumerate() {
            validate_constraint(c, self).map_err(|e| SketchError::Schema { constraint: i, source: e })?;
        }
        Ok(())
    }

    /// Same primitives with every constraint removed.
    pub fn stripped(&self) -> Sketch {
        Sketch {
            id: self.id.clone(),
            primitives: self.primitives.clone(),
            constraints: Vec::new(),
            extra: self.extra.clone(),
        }
    }

    pub fn total_dof(&self) -> usize {
        self.primitives.iter().map(Primitive::dof).sum()
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SketchError {
    #[error(transparent)]
    Model(ModelError),
    #[error("constraint {constraint}: {source}")]
    Schema { constraint: usize, source: SchemaError },
}
