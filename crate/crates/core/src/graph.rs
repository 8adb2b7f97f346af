//! Geometric constraint multi-hypergraphs.
//!
//! Nodes are primitives plus their referenceable sub-primitives (line
//! endpoints, arc endpoints and centers, circle and ellipse centers). Each
//! constraint becomes exactly one edge over the nodes its locals point at:
//! single-member edges are loops, three or more members form a hyperedge.
//! Every sub-node is tied to its parent by a [`EdgeKind::SubPrimitiveLink`].

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{Selector, Sketch, SketchError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Primitive { primitive: usize },
    Sub { primitive: usize, selector: Selector },
}

impl NodeKind {
    pub fn primitive(&self) -> usize {
        match *self {
            NodeKind::Primitive { primitive } | NodeKind::Sub { primitive, .. } => primitive,
        }
    }

    pub fn selector(&self) -> Option<Selector> {
        match *self {
            NodeKind::Primitive { .. } => None,
            NodeKind::Sub { selector, .. } => Some(selector),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: usize,
    pub kind: NodeKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Constraint { constraint: usize },
    SubPrimitiveLink,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: usize,
    pub kind: EdgeKind,
    pub members: Vec<usize>,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.members.len() == 1
    }

    pub fn is_hyperedge(&self) -> bool {
        self.members.len() >= 3
    }

    pub fn constraint(&self) -> Option<usize> {
        match self.kind {
            EdgeKind::Constraint { constraint } => Some(constraint),
            EdgeKind::SubPrimitiveLink => None,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error(transparent)]
    Sketch(#[from] SketchError),
    #[error("statistic needs at least two primitives")]
    EmptyGraph,
    #[error("ordering is not a permutation of the primitives")]
    BadOrder,
}

/// Node ids of one primitive: its own node and its sub-nodes by selector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveNodes {
    pub node: usize,
    pub subs: Vec<(Selector, usize)>,
}

impl PrimitiveNodes {
    pub fn sub(&self, sel: Selector) -> Option<usize> {
        self.subs.iter().find(|(s, _)| *s == sel).map(|(_, n)| *n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    /// Edge ids incident to each node, ascending.
    pub incidence: Vec<Vec<usize>>,
    pub primitives: Vec<PrimitiveNodes>,
}

impl ConstraintGraph {
    /// Build the graph of a validated sketch. Node ids are assigned per
    /// primitive in insertion order, each primitive node followed directly by
    /// its sub-nodes.
    pub fn build(sketch: &Sketch) -> Result<Self, GraphError> {
        sketch.validate()?;
        Ok(Self::build_unchecked(sketch))
    }

    /// Build without validating; dangling references are skipped.
    pub fn build_unchecked(sketch: &Sketch) -> Self {
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        let mut primitives = Vec::with_capacity(sketch.primitives.len());
        for (pi, p) in sketch.primitives.iter().enumerate() {
            let node = nodes.len();
            nodes.push(Node {
                id: node,
                kind: NodeKind::Primitive { primitive: pi },
            });
            let mut subs = Vec::new();
            for &sel in p.kind().sub_selectors() {
                let id = nodes.len();
                nodes.push(Node {
                    id,
                    kind: NodeKind::Sub {
                        primitive: pi,
                        selector: sel,
                    },
                });
                edges.push(Edge {
                    id: edges.len(),
                    kind: EdgeKind::SubPrimitiveLink,
                    members: vec![node, id],
                });
                subs.push((sel, id));
            }
            primitives.push(PrimitiveNodes { node, subs });
        }
        let index = sketch.index_map();
        for (ci, c) in sketch.constraints.iter().enumerate() {
            let members: Vec<usize> = c
                .locals
                .iter()
                .filter_map(|r| {
                    let pn = &primitives[*index.get(r.primitive.as_str())?];
                    match r.selector {
                        None => Some(pn.node),
                        Some(sel) => pn.sub(sel),
                    }
                })
                .collect();
            edges.push(Edge {
                id: edges.len(),
                kind: EdgeKind::Constraint { constraint: ci },
                members,
            });
        }
        let mut incidence = vec![Vec::new(); nodes.len()];
        for e in &edges {
            let unique: BTreeSet<usize> = e.members.iter().copied().collect();
            for n in unique {
                incidence[n].push(e.id);
            }
        }
        ConstraintGraph {
            nodes,
            edges,
            incidence,
            primitives,
        }
    }

    pub fn primitive_count(&self) -> usize {
        self.primitives.len()
    }

    pub fn constraint_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.constraint().is_some())
    }

    /// Node id for a primitive index and optional selector.
    pub fn node_of(&self, primitive: usize, selector: Option<Selector>) -> Option<usize> {
        let pn = self.primitives.get(primitive)?;
        match selector {
            None => Some(pn.node),
            Some(sel) => pn.sub(sel),
        }
    }

    pub fn parent(&self, node: usize) -> usize {
        self.nodes[node].kind.primitive()
    }

    /// Distinct primitives touched by each constraint edge. With `collapse`
    /// sub-node members count for their parent; without it only edges that
    /// attach to the primitive node itself count.
    pub fn edge_primitives(&self, collapse: bool) -> Vec<BTreeSet<usize>> {
        self.constraint_edges()
            .map(|e| {
                e.members
                    .iter()
                    .filter(|&&n| collapse || matches!(self.nodes[n].kind, NodeKind::Primitive { .. }))
                    .map(|&n| self.parent(n))
                    .collect()
            })
            .collect()
    }

    /// Symmetric primitive adjacency through constraint edges.
    pub fn primitive_adjacency(&self, collapse: bool) -> Vec<Vec<bool>> {
        let n = self.primitive_count();
        let mut adj = vec![vec![false; n]; n];
        for members in self.edge_primitives(collapse) {
            let m: Vec<usize> = members.into_iter().collect();
            for (i, &a) in m.iter().enumerate() {
                for &b in &m[i + 1..] {
                    adj[a][b] = true;
                    adj[b][a] = true;
                }
            }
        }
        adj
    }

    /// Number of constraint edges incident to each primitive (sub-nodes
    /// collapsed; an edge counts once per primitive it touches).
    pub fn primitive_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.primitive_count()];
        for members in self.edge_primitives(true) {
            for p in members {
                deg[p] += 1;
            }
        }
        deg
    }
}

pub fn build_graph(sketch: &Sketch) -> Result<ConstraintGraph, GraphError> {
    ConstraintGraph::build(sketch)
}

/// Adjacency statistics of a primitive ordering.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdjacencyRate {
    /// Fraction of consecutive pairs in the ordering joined by a constraint.
    pub adjacent_rate: f64,
    /// Fraction of all unordered primitive pairs joined by a constraint.
    pub random_baseline: f64,
    pub consecutive_pairs: usize,
    pub all_pairs: usize,
}

/// How often primitives adjacent in `order` share a constraint, against the
/// rate for a random pair. `collapse_subnodes` folds sub-node memberships
/// into their parent primitive.
pub fn order_adjacency_rate(
    g: &ConstraintGraph,
    order: &[usize],
    collapse_subnodes: bool,
) -> Result<AdjacencyRate, GraphError> {
    let n = g.primitive_count();
    if n < 2 {
        return Err(GraphError::EmptyGraph);
    }
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(GraphError::BadOrder);
    }
    let adj = g.primitive_adjacency(collapse_subnodes);
    let consecutive = order.windows(2).filter(|w| adj[w[0]][w[1]]).count();
    let mut linked = 0usize;
    for a in 0..n {
        for b in a + 1..n {
            linked += adj[a][b] as usize;
        }
    }
    let all_pairs = n * (n - 1) / 2;
    Ok(AdjacencyRate {
        adjacent_rate: consecutive as f64 / (n - 1) as f64,
        random_baseline: linked as f64 / all_pairs as f64,
        consecutive_pairs: n - 1,
        all_pairs,
    })
}

/// Mean degree at each sequence position across a corpus.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DegreeByPosition {
    sums: Vec<u64>,
    counts: Vec<u64>,
}

impl DegreeByPosition {
    pub fn add(&mut self, g: &ConstraintGraph, order: &[usize]) {
        let deg = g.primitive_degrees();
        if self.sums.len() < order.len() {
            self.sums.resize(order.len(), 0);
            self.counts.resize(order.len(), 0);
        }
        for (pos, &p) in order.iter().enumerate() {
            self.sums[pos] += deg[p] as u64;
            self.counts[pos] += 1;
        }
    }

    pub fn merge(&mut self, other: &DegreeByPosition) {
        if self.sums.len() < other.sums.len() {
            self.sums.resize(other.sums.len(), 0);
            self.counts.resize(other.counts.len(), 0);
        }
        for i in 0..other.sums.len() {
            self.sums[i] += other.sums[i];
            self.counts[i] += other.counts[i];
        }
    }

    /// `(position, mean degree, count)` rows.
    pub fn rows(&self) -> Vec<(usize, f64, u64)> {
        self.sums
            .iter()
            .zip(&self.counts)
            .enumerate()
            .filter(|(_, (_, &c))| c > 0)
            .map(|(i, (&s, &c))| (i, s as f64 / c as f64, c))
            .collect()
    }
}

pub fn degree_by_position<'a, I>(corpus: I) -> Vec<(usize, f64, u64)>
where
    I: IntoIterator<Item = (&'a ConstraintGraph, &'a [usize])>,
{
    let mut acc = DegreeByPosition::default();
    for (g, order) in corpus {
        acc.add(g, order);
    }
    acc.rows()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Constraint, ConstraintType, EntityRef, Geometry, Primitive, StandardPrimitive};
    use crate::units::Length;
    use crate::Vec2;

    fn line(id: &str, x: f64) -> Primitive {
        Primitive::from_standard(
            id,
            &StandardPrimitive::Line {
                start: Vec2::new(x, 0.0),
                end: Vec2::new(x + 1.0, 0.0),
            },
        )
        .unwrap()
    }

    fn circle(id: &str) -> Primitive {
        Primitive::from_standard(
            id,
            &StandardPrimitive::Circle {
                center: Vec2::ZERO,
                radius: 0.005,
            },
        )
        .unwrap()
    }

    fn point(id: &str) -> Primitive {
        Primitive::new(id, Geometry::Point { x: 0.0, y: 0.0 })
    }

    #[test]
    fn circle_with_radius() {
        let s = Sketch::new(
            "c",
            vec![circle("c")],
            vec![Constraint::dimension(ConstraintType::Radius, EntityRef::whole("c"), Length::mm(5.0))],
        );
        let g = build_graph(&s).unwrap();
        assert_eq!(g.nodes.len(), 2);
        assert_eq!(
            g.nodes[1].kind,
            NodeKind::Sub {
                primitive: 0,
                selector: Selector::Center
            }
        );
        assert_eq!(g.edges.len(), 2);
        assert_eq!(g.edges[0].kind, EdgeKind::SubPrimitiveLink);
        assert_eq!(g.edges[0].members, vec![0, 1]);
        assert!(g.edges[1].is_loop());
        assert_eq!(g.edges[1].members, vec![0]);
    }

    #[test]
    fn coincident_endpoints() {
        let s = Sketch::new(
            "ab",
            vec![line("a", 0.0), line("b", 1.0)],
            vec![Constraint::pair(
                ConstraintType::Coincident,
                EntityRef::sub("a", Selector::End),
                EntityRef::sub("b", Selector::Start),
            )],
        );
        let g = build_graph(&s).unwrap();
        assert_eq!(g.nodes.len(), 6);
        let links = g.edges.iter().filter(|e| e.kind == EdgeKind::SubPrimitiveLink).count();
        assert_eq!(links, 4);
        let c: Vec<_> = g.constraint_edges().collect();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].members, vec![g.node_of(0, Some(Selector::End)).unwrap(), g.node_of(1, Some(Selector::Start)).unwrap()]);
    }

    #[test]
    fn mirror_is_hyperedge() {
        let s = Sketch::new(
            "m",
            vec![point("a"), point("b"), line("axis", 0.0)],
            vec![Constraint::new(
                ConstraintType::Mirror,
                vec![EntityRef::whole("a"), EntityRef::whole("b"), EntityRef::whole("axis")],
            )],
        );
        let g = build_graph(&s).unwrap();
        let e: Vec<_> = g.constraint_edges().collect();
        assert!(e[0].is_hyperedge());
        assert_eq!(e[0].members.len(), 3);
    }

    #[test]
    fn multi_edges_preserved() {
        let par = || Constraint::pair(ConstraintType::Parallel, EntityRef::whole("a"), EntityRef::whole("b"));
        let s = Sketch::new("mm", vec![line("a", 0.0), line("b", 2.0)], vec![par(), par()]);
        let g = build_graph(&s).unwrap();
        let e: Vec<_> = g.constraint_edges().collect();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].members, e[1].members);
    }

    fn path_abc() -> ConstraintGraph {
        let s = Sketch::new(
            "p",
            vec![line("a", 0.0), line("b", 1.0), line("c", 2.0)],
            vec![
                Constraint::pair(
                    ConstraintType::Coincident,
                    EntityRef::sub("a", Selector::End),
                    EntityRef::sub("b", Selector::Start),
                ),
                Constraint::pair(ConstraintType::Parallel, EntityRef::whole("b"), EntityRef::whole("c")),
            ],
        );
        build_graph(&s).unwrap()
    }

    #[test]
    fn adjacency_rates() {
        let g = path_abc();
        let r = order_adjacency_rate(&g, &[0, 1, 2], true).unwrap();
        assert_eq!(r.adjacent_rate, 1.0);
        assert!((r.random_baseline - 2.0 / 3.0).abs() < 1e-15);
        // the a-b link is via sub-nodes only
        let r = order_adjacency_rate(&g, &[0, 1, 2], false).unwrap();
        assert_eq!(r.adjacent_rate, 0.5);

        let bare = ConstraintGraph::build(&Sketch::new("n", vec![line("a", 0.0), line("b", 1.0)], vec![])).unwrap();
        let r = order_adjacency_rate(&bare, &[1, 0], true).unwrap();
        assert_eq!((r.adjacent_rate, r.random_baseline), (0.0, 0.0));

        assert_eq!(order_adjacency_rate(&bare, &[0, 0], true), Err(GraphError::BadOrder));
        let single = ConstraintGraph::build(&Sketch::new("s", vec![line("a", 0.0)], vec![])).unwrap();
        assert_eq!(order_adjacency_rate(&single, &[0], true), Err(GraphError::EmptyGraph));
    }

    #[test]
    fn complete_graph_rates() {
        let s = Sketch::new(
            "k3",
            vec![line("a", 0.0), line("b", 1.0), line("c", 2.0)],
            vec![
                Constraint::pair(ConstraintType::Parallel, EntityRef::whole("a"), EntityRef::whole("b")),
                Constraint::pair(ConstraintType::Parallel, EntityRef::whole("b"), EntityRef::whole("c")),
                Constraint::pair(ConstraintType::Parallel, EntityRef::whole("a"), EntityRef::whole("c")),
            ],
        );
        let g = build_graph(&s).unwrap();
        for order in [[0, 1, 2], [2, 0, 1], [1, 2, 0]] {
            let r = order_adjacency_rate(&g, &order, true).unwrap();
            assert_eq!((r.adjacent_rate, r.random_baseline), (1.0, 1.0));
        }
    }

    #[test]
    fn degrees_along_sequence() {
        let g = path_abc();
        let order = [0usize, 1, 2];
        let rows = degree_by_position([(&g, &order[..])]);
        assert_eq!(rows, vec![(0, 1.0, 1), (1, 2.0, 1), (2, 1.0, 1)]);
        let rows = degree_by_position([(&g, &order[..]), (&g, &order[..])]);
        assert_eq!(rows, vec![(0, 1.0, 2), (1, 2.0, 2), (2, 1.0, 2)]);
        assert!(degree_by_position(std::iter::empty()).is_empty());
    }

    #[test]
    fn star_hub_first_has_highest_degree() {
        let mut prims = vec![point("hub")];
        let mut cons = Vec::new();
        for i in 0..4 {
            let id = format!("s{i}");
            prims.push(point(&id));
            cons.push(Constraint::pair(ConstraintType::Coincident, EntityRef::whole("hub"), EntityRef::whole(id)));
        }
        let g = build_graph(&Sketch::new("star", prims, cons)).unwrap();
        let order: Vec<usize> = (0..5).collect();
        let rows = degree_by_position([(&g, &order[..]), (&g, &order[..])]);
        assert_eq!(rows[0].1, 4.0);
        assert!(rows[1..].iter().all(|r| r.1 < rows[0].1));
    }
}
