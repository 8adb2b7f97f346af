//! Parametric CAD sketches as geometric constraint multi-hypergraphs.

pub mod autoconstrain;
pub mod dof;
pub mod geom;
pub mod graph;
pub mod ingest;
pub mod model;
pub mod render;
pub mod sequence;
pub mod solver;
pub mod units;

pub use geom::Vec2;
pub use model::{
    Constraint, ConstraintType, EntityRef, Geometry, Primitive, PrimitiveType, Selector, Sketch,
    StandardPrimitive,
};
pub use units::{Length, LengthUnit};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/sketches.md")]
    mod sketches {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/sequences.md")]
    mod sequences {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/autoconstrain.md")]
    mod autoconstrain {}
    #[doc = include_str!("../../../book/src/rendering.md")]
    mod rendering {}
    #[doc = include_str!("../../../book/src/corpora.md")]
    mod corpora {}
}
