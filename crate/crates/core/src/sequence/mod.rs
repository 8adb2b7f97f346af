//! Construction sequences: a sketch replayed as node and edge insertions.
//!
//! The canonical order inserts primitives as the user did and emits each
//! constraint right after its last member primitive appears. Constraints
//! that become available at the same moment keep their standalone order.

mod entropy;
mod tokens;

use thiserror::Error;

use crate::graph::ConstraintGraph;
use crate::model::{
    Constraint, ConstraintType, Direction, HalfSpace, PrimitiveType, Selector, Sketch,
};

pub use entropy::{encode_tokens, entropy_rate_estimate, token_width, Codec, Lzma};
pub use tokens::{write_token_stream, TokenVocabulary, VocabularyOptions};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SequenceError {
    #[error("constraint {constraint} references {reference}, which is never inserted")]
    DanglingReference { constraint: usize, reference: String },
    #[error("graph does not belong to this sketch")]
    GraphMismatch,
    #[error("out of vocabulary: {0}")]
    OutOfVocabulary(String),
    #[error("malformed token stream at position {position}: {detail}")]
    MalformedTokens { position: usize, detail: String },
    #[error("entropy estimate needs n1 < n2 <= {available}, got n1 = {n1}, n2 = {n2}")]
    InsufficientCorpus { n1: usize, n2: usize, available: usize },
    #[error("compression failed: {0}")]
    Codec(String),
    #[error("invalid sketch: {0}")]
    InvalidSketch(String),
}

/// Which of the two construction orders to extract.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SequenceOrder {
    #[default]
    Canonical,
    ConstraintsLast,
}

/// Build the graph of `s` and extract a sequence from it.
pub fn sketch_sequence(s: &Sketch, order: SequenceOrder) -> Result<ConstructionSequence, SequenceError> {
    let g = ConstraintGraph::build(s).map_err(|e| SequenceError::InvalidSketch(e.to_string()))?;
    match order {
        SequenceOrder::Canonical => canonical_sequence(s, &g),
        SequenceOrder::ConstraintsLast => constraints_last_sequence(s, &g),
    }
}

/// Parameters an edge carries besides its members. Lengths are meters,
/// angles degrees.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EdgeParams {
    pub direction: Option<Direction>,
    pub half_space0: Option<HalfSpace>,
    pub half_space1: Option<HalfSpace>,
    pub aligned: Option<bool>,
    pub clockwise: Option<bool>,
    pub length: Option<f64>,
    pub angle: Option<f64>,
}

impl EdgeParams {
    pub fn of(c: &Constraint) -> Self {
        EdgeParams {
            direction: c.direction,
            half_space0: c.half_space0,
            half_space1: c.half_space1,
            aligned: c.aligned,
            clockwise: c.clockwise,
            length: c.length.map(|l| l.meters()),
            angle: c.angle,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ConstructionOp {
    AddNode {
        primitive: usize,
        kind: PrimitiveType,
    },
    AddEdge {
        constraint: usize,
        kind: ConstraintType,
        /// Referenced (primitive index, selector) in local order.
        refs: Vec<(usize, Option<Selector>)>,
        /// Graph node ids of the refs.
        members: Vec<usize>,
        params: EdgeParams,
    },
    Stop,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConstructionSequence {
    pub ops: Vec<ConstructionOp>,
}

impl ConstructionSequence {
    pub fn node_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|o| matches!(o, ConstructionOp::AddNode { .. }))
            .count()
    }

    pub fn edge_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|o| matches!(o, ConstructionOp::AddEdge { .. }))
            .count()
    }

    /// Renumber constraint indices by order of appearance.
    pub fn normalized(&self) -> Self {
        let mut next = 0;
        let ops = self
            .ops
            .iter()
            .map(|op| match op {
                ConstructionOp::AddEdge {
                    kind,
                    refs,
                    members,
                    params,
                    ..
                } => {
                    next += 1;
                    ConstructionOp::AddEdge {
                        constraint: next - 1,
                        kind: *kind,
                        refs: refs.clone(),
                        members: members.clone(),
                        params: *params,
                    }
                }
                other => other.clone(),
            })
            .collect();
        ConstructionSequence { ops }
    }

    /// Short textual form, e.g. `Line0 Coincident0 Stop`.
    pub fn summary(&self) -> String {
        let parts: Vec<String> = self
            .ops
            .iter()
            .map(|op| match op {
                ConstructionOp::AddNode { primitive, kind } => format!("{}{primitive}", kind.name()),
                ConstructionOp::AddEdge { constraint, kind, .. } => format!("{}{constraint}", kind.name()),
                ConstructionOp::Stop => "Stop".to_string(),
            })
            .collect();
        parts.join(" ")
    }
}

struct EdgeInfo {
    refs: Vec<(usize, Option<Selector>)>,
    members: Vec<usize>,
    last: usize,
}

fn edge_infos(s: &Sketch, g: &ConstraintGraph) -> Result<Vec<EdgeInfo>, SequenceError> {
    if g.primitive_count() != s.primitives.len() {
        return Err(SequenceError::GraphMismatch);
    }
    let index = s.index_map();
    s.constraints
        .iter()
        .enumerate()
        .map(|(ci, c)| {
            let mut refs = Vec::with_capacity(c.locals.len());
            let mut members = Vec::with_capacity(c.locals.len());
            for r in &c.locals {
                let dangling = || SequenceError::DanglingReference {
                    constraint: ci,
                    reference: r.to_string(),
                };
                let pi = *index.get(r.primitive.as_str()).ok_or_else(dangling)?;
                members.push(g.node_of(pi, r.selector).ok_or_else(dangling)?);
                refs.push((pi, r.selector));
            }
            let last = refs.iter().map(|r| r.0).max().ok_or(SequenceError::DanglingReference {
                constraint: ci,
                reference: String::new(),
            })?;
            Ok(EdgeInfo { refs, members, last })
        })
        .collect()
}

fn add_edge(s: &Sketch, ci: usize, info: &EdgeInfo) -> ConstructionOp {
    let c = &s.constraints[ci];
    ConstructionOp::AddEdge {
        constraint: ci,
        kind: c.kind,
        refs: info.refs.clone(),
        members: info.members.clone(),
        params: EdgeParams::of(c),
    }
}

fn add_node(s: &Sketch, pi: usize) -> ConstructionOp {
    ConstructionOp::AddNode {
        primitive: pi,
        kind: s.primitives[pi].kind(),
    }
}

/// Interleaved order: each constraint directly after its last member.
pub fn canonical_sequence(s: &Sketch, g: &ConstraintGraph) -> Result<ConstructionSequence, SequenceError> {
    let infos = edge_infos(s, g)?;
    let mut by_last: Vec<Vec<usize>> = vec![Vec::new(); s.primitives.len()];
    for (ci, info) in infos.iter().enumerate() {
        by_last[info.last].push(ci);
    }
    let mut ops = Vec::with_capacity(s.primitives.len() + s.constraints.len() + 1);
    for (pi, edges) in by_last.iter().enumerate() {
        ops.push(add_node(s, pi));
        ops.extend(edges.iter().map(|&ci| add_edge(s, ci, &infos[ci])));
    }
    ops.push(ConstructionOp::Stop);
    Ok(ConstructionSequence { ops })
}

/// All primitives first, then all constraints in standalone order.
pub fn constraints_last_sequence(s: &Sketch, g: &ConstraintGraph) -> Result<ConstructionSequence, SequenceError> {
    let infos = edge_infos(s, g)?;
    let mut ops: Vec<ConstructionOp> = (0..s.primitives.len()).map(|pi| add_node(s, pi)).collect();
    ops.extend(infos.iter().enumerate().map(|(ci, info)| add_edge(s, ci, info)));
    ops.push(ConstructionOp::Stop);
    Ok(ConstructionSequence { ops })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConstraintType as T, EntityRef, Primitive, StandardPrimitive as S};
    use crate::Vec2;

    fn pts(n: usize) -> Vec<Primitive> {
        (0..n)
            .map(|i| Primitive::from_standard(format!("p{i}"), &S::Point(Vec2::new(i as f64, 0.0))).unwrap())
            .collect()
    }

    fn pair(a: usize, b: usize) -> Constraint {
        Constraint::pair(
            T::Coincident,
            EntityRef::whole(format!("p{a}")),
            EntityRef::whole(format!("p{b}")),
        )
    }

    fn seq_of(s: &Sketch) -> (String, String) {
        let g = ConstraintGraph::build(s).unwrap();
        (
            canonical_sequence(s, &g).unwrap().summary(),
            constraints_last_sequence(s, &g).unwrap().summary(),
        )
    }

    #[test]
    fn chain() {
        let s = Sketch::new("c", pts(3), vec![pair(0, 1), pair(1, 2)]);
        let (canon, last) = seq_of(&s);
        assert_eq!(canon, "Point0 Point1 Coincident0 Point2 Coincident1 Stop");
        assert_eq!(last, "Point0 Point1 Point2 Coincident0 Coincident1 Stop");
    }

    #[test]
    fn ties_keep_standalone_order() {
        let mut e2 = pair(0, 1);
        e2.kind = T::Horizontal;
        let s = Sketch::new("t", pts(2), vec![e2, pair(0, 1)]);
        assert_eq!(seq_of(&s).0, "Point0 Point1 Horizontal0 Coincident1 Stop");
    }

    #[test]
    fn loop_follows_its_node() {
        let line = |id: &str, y: f64| {
            Primitive::from_standard(
                id,
                &S::Line {
                    start: Vec2::new(0.0, y),
                    end: Vec2::new(1.0, y),
                },
            )
            .unwrap()
        };
        let s = Sketch::new(
            "l",
            vec![line("a", 0.0), line("b", 1.0)],
            vec![Constraint::new(T::Horizontal, vec![EntityRef::whole("a")])],
        );
        assert_eq!(seq_of(&s).0, "Line0 Horizontal0 Line1 Stop");
    }

    #[test]
    fn no_constraints() {
        let s = Sketch::new("e", pts(2), vec![]);
        assert_eq!(seq_of(&s).1, "Point0 Point1 Stop");
    }

    #[test]
    fn dangling_reference_reported() {
        let s = Sketch::new("d", pts(2), vec![pair(0, 1)]);
        let g = ConstraintGraph::build(&s).unwrap();
        let mut broken = s.clone();
        broken.constraints[0].locals[1] = EntityRef::whole("zz");
        assert!(matches!(
            canonical_sequence(&broken, &g),
            Err(SequenceError::DanglingReference { constraint: 0, .. })
        ));
    }

    #[test]
    fn normalized_renumbers_by_appearance() {
        let s = Sketch::new("n", pts(3), vec![pair(1, 2), pair(0, 1)]);
        let g = ConstraintGraph::build(&s).unwrap();
        let canon = canonical_sequence(&s, &g).unwrap();
        assert_eq!(canon.summary(), "Point0 Point1 Coincident1 Point2 Coincident0 Stop");
        assert_eq!(
            canon.normalized().summary(),
            "Point0 Point1 Coincident0 Point2 Coincident1 Stop"
        );
    }
}
