//! Constraint inference for bare geometry.
//!
//! [`enumerate_candidates`] lists every one- and two-node constraint the
//! geometry already satisfies. [`infer_constraints`] walks that list in
//! policy order and keeps a candidate only if it raises the rank of the
//! constraint Jacobian, stopping short of the DOF target.

mod policy;

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::dof::RankTracker;
use crate::graph::ConstraintGraph;
use crate::model::{
    Constraint, ConstraintType, Direction, EntityRef, HalfSpace, Primitive, Provenance, Selector, Sketch,
};
use crate::solver::{primitive_values, single_residuals, EntityClass, System};
use crate::units::{Length, LengthUnit};

pub use policy::{PriorityPolicy, RankingPolicy};

/// Residual bound for a candidate to count as satisfied.
pub const ENUMERATION_TOLERANCE: f64 = 1e-6;

/// Default DOF left free after inference: a rigid motion.
pub const DEFAULT_DOF_TARGET: usize = 3;

/// Types considered by enumeration.
pub const ENUMERATED_TYPES: [ConstraintType; 13] = [
    ConstraintType::Coincident,
    ConstraintType::Horizontal,
    ConstraintType::Vertical,
    ConstraintType::Parallel,
    ConstraintType::Perpendicular,
    ConstraintType::Tangent,
    ConstraintType::Equal,
    ConstraintType::Concentric,
    ConstraintType::Midpoint,
    ConstraintType::Radius,
    ConstraintType::Diameter,
    ConstraintType::Length,
    ConstraintType::Distance,
];

/// The ten most frequent length values in the public dataset, most common
/// first.
pub fn common_lengths() -> [Length; 10] {
    use LengthUnit::{Centimeter as Cm, Inch as In, Millimeter as Mm};
    [
        Length::new(5.0, Mm),
        Length::new(1.0, Cm),
        Length::new(3.0, Mm),
        Length::new(0.5, In),
        Length::new(2.0, Mm),
        Length::new(1.0, In),
        Length::new(2.0, Cm),
        Length::new(4.0, Mm),
        Length::new(8.0, Mm),
        Length::new(0.25, In),
    ]
}

/// The ten most frequent angle values in degrees, most common first.
pub const COMMON_ANGLES: [f64; 10] = [45.0, 15.0, 60.0, 120.0, 30.0, 135.0, 90.0, 10.0, 20.0, 150.0];

/// Common value within `tol` meters, else the measurement itself.
pub fn snap_length(meters: f64, tol: f64) -> Length {
    common_lengths()
        .into_iter()
        .find(|l| (l.meters() - meters).abs() <= tol)
        .unwrap_or_else(|| Length::from_meters(meters))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub constraint: Constraint,
    /// Largest absolute residual on the input geometry.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnumerationOptions {
    pub tolerance: f64,
    /// Distance candidates beyond this count keep only related or nearest
    /// pairs.
    pub max_distance_pairs: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            tolerance: ENUMERATION_TOLERANCE,
            max_distance_pairs: 2000,
        }
    }
}

/// Identity of a constraint for set comparisons: type, unordered members
/// and quantized parameters. Half spaces are left out since they follow
/// from the geometry.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConstraintKey {
    pub kind: ConstraintType,
    pub members: Vec<EntityRef>,
    /// Nanometers.
    pub length: Option<i64>,
    /// Micro-degrees.
    pub angle: Option<i64>,
    pub direction: Option<Direction>,
    pub aligned: Option<bool>,
    pub clockwise: Option<bool>,
}

impl ConstraintKey {
    pub fn of(c: &Constraint) -> Self {
        let mut members = c.locals.clone();
        members.sort();
        let direction = match c.kind {
            ConstraintType::Length | ConstraintType::Distance => Some(c.direction.unwrap_or(Direction::Minimum)),
            _ => c.direction,
        };
        let is_angle = c.kind == ConstraintType::Angle;
        ConstraintKey {
            kind: c.kind,
            members,
            length: c.length.map(|l| (l.meters() * 1e9).round() as i64),
            angle: c.angle.map(|a| (a * 1e6).round() as i64),
            direction,
            aligned: if is_angle { c.aligned } else { None },
            clockwise: if is_angle { c.clockwise } else { None },
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Ref {
    prim: usize,
    sel: Option<Selector>,
    class: EntityClass,
}

impl Ref {
    fn entity(&self, s: &Sketch) -> EntityRef {
        let id = s.primitives[self.prim].id.clone();
        match self.sel {
            None => EntityRef::whole(id),
            Some(sel) => EntityRef::sub(id, sel),
        }
    }
}

fn refs_of(s: &Sketch) -> Vec<Ref> {
    let mut out = Vec::new();
    for (pi, p) in s.primitives.iter().enumerate() {
        let kind = p.kind();
        if !kind.is_solver_supported() || primitive_values(p).is_none() || p.validate().is_err() {
            continue;
        }
        if let Some(class) = crate::solver::residual::entity_class(kind, None) {
            out.push(Ref { prim: pi, sel: None, class });
        }
        for &sel in kind.sub_selectors() {
            out.push(Ref {
                prim: pi,
                sel: Some(sel),
                class: EntityClass::Point,
            });
        }
    }
    out
}

fn pair_types(a: EntityClass, b: EntityClass) -> &'static [ConstraintType] {
    use ConstraintType as T;
    use EntityClass as C;
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    match (a, b) {
        (C::Point, C::Point) => &[T::Coincident, T::Horizontal, T::Vertical],
        (C::Point, C::Line) => &[T::Coincident, T::Midpoint],
        (C::Point, _) => &[T::Coincident, T::Concentric],
        (C::Line, C::Line) => &[T::Coincident, T::Parallel, T::Perpendicular, T::Equal],
        (C::Line, _) => &[T::Tangent],
        _ => &[T::Coincident, T::Tangent, T::Equal, T::Concentric],
    }
}

struct Enumerator<'a> {
    sketch: &'a Sketch,
    index: HashMap<&'a str, usize>,
    tol: f64,
    seen: HashSet<ConstraintKey>,
    out: Vec<Candidate>,
}

impl Enumerator<'_> {
    fn test(&mut self, c: Constraint) -> bool {
        let Ok(r) = single_residuals(&c, self.sketch, &self.index) else {
            return false;
        };
        let residual = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(residual <= self.tol) {
            return false;
        }
        if self.seen.insert(ConstraintKey::of(&c)) {
            self.out.push(Candidate {
                constraint: c.with_provenance(Provenance::Predicted),
                residual,
            });
        }
        true
    }
}

fn point_of(p: &Primitive, sel: Option<Selector>) -> Option<crate::Vec2> {
    match sel {
        Some(s) => p.sub_point(s),
        None => match p.to_standard().ok()? {
            crate::model::StandardPrimitive::Point(v) => Some(v),
            _ => None,
        },
    }
}

fn line_of(p: &Primitive) -> Option<(crate::Vec2, crate::Vec2)> {
    match p.to_standard().ok()? {
        crate::model::StandardPrimitive::Line { start, end } => Some((start, end)),
        _ => None,
    }
}

fn signed_line_distance(p: crate::Vec2, a: crate::Vec2, b: crate::Vec2) -> Option<f64> {
    let d = b - a;
    let n = d.norm();
    (n > 0.0).then(|| d.cross(p - a) / n)
}

/// A distance candidate before the cap: (ref a, ref b, signed measurement).
struct DistancePair {
    a: usize,
    b: usize,
    signed: f64,
}

pub fn enumerate_candidates(s: &Sketch, tol: f64) -> Vec<Candidate> {
    enumerate_candidates_with(
        s,
        &EnumerationOptions {
            tolerance: tol,
            ..Default::default()
        },
    )
}

pub fn enumerate_candidates_with(s: &Sketch, opts: &EnumerationOptions) -> Vec<Candidate> {
    use ConstraintType as T;
    let refs = refs_of(s);
    let mut en = Enumerator {
        sketch: s,
        index: s.index_map(),
        tol: opts.tolerance,
        seen: HashSet::new(),
        out: Vec::new(),
    };
    // single-node candidates
    for r in refs.iter().filter(|r| r.sel.is_none()) {
        let e = r.entity(s);
        let p = &s.primitives[r.prim];
        match r.class {
            EntityClass::Line => {
                en.test(Constraint::new(T::Horizontal, vec![e.clone()]));
                en.test(Constraint::new(T::Vertical, vec![e.clone()]));
                if let Some((a, b)) = line_of(p) {
                    en.test(Constraint::line_length(e, snap_length(a.distance(b), opts.tolerance)));
                }
            }
            EntityClass::Circle | EntityClass::Arc => {
                if let Some(radius) = p.geometry.radius() {
                    en.test(Constraint::dimension(T::Radius, e.clone(), snap_length(radius, opts.tolerance)));
                    en.test(Constraint::dimension(
                        T::Diameter,
                        e,
                        snap_length(2.0 * radius, opts.tolerance),
                    ));
                }
            }
            EntityClass::Point => {}
        }
    }
    // two-node candidates
    let mut related: HashSet<(usize, usize)> = HashSet::new();
    let mut distances = Vec::new();
    for i in 0..refs.len() {
        for j in i + 1..refs.len() {
            let (ra, rb) = (refs[i], refs[j]);
            if ra.prim == rb.prim {
                continue;
            }
            let (ea, eb) = (ra.entity(s), rb.entity(s));
            for &kind in pair_types(ra.class, rb.class) {
                if en.test(Constraint::pair(kind, ea.clone(), eb.clone())) {
                    related.insert((ra.prim.min(rb.prim), ra.prim.max(rb.prim)));
                }
            }
            if let Some(signed) = distance_measure(s, ra, rb) {
                if signed.abs() > opts.tolerance {
                    distances.push(DistancePair { a: i, b: j, signed });
                }
            }
        }
    }
    if distances.len() > opts.max_distance_pairs {
        let is_related = |d: &DistancePair| {
            let (pa, pb) = (refs[d.a].prim, refs[d.b].prim);
            related.contains(&(pa.min(pb), pa.max(pb)))
        };
        let (mut keep, mut rest): (Vec<_>, Vec<_>) = distances.into_iter().partition(|d| is_related(d));
        rest.sort_by(|x, y| x.signed.abs().total_cmp(&y.signed.abs()));
        let room = opts.max_distance_pairs.saturating_sub(keep.len());
        keep.extend(rest.into_iter().take(room));
        keep.sort_by_key(|d| (d.a, d.b));
        distances = keep;
    }
    for d in distances {
        let (ra, rb) = (refs[d.a], refs[d.b]);
        let side = HalfSpace::from_sign(d.signed);
        let c = Constraint::distance(ra.entity(s), rb.entity(s), snap_length(d.signed.abs(), opts.tolerance))
            .with_half_spaces(side, side);
        en.test(c);
    }
    en.out
}

/// Signed distance for the supported distance pairs: point-point (always
/// positive), point-line and parallel line-line (signed by side).
fn distance_measure(s: &Sketch, a: Ref, b: Ref) -> Option<f64> {
    let pa = &s.primitives[a.prim];
    let pb = &s.primitives[b.prim];
    match (a.class, b.class) {
        (EntityClass::Point, EntityClass::Point) => Some(point_of(pa, a.sel)?.distance(point_of(pb, b.sel)?)),
        (EntityClass::Point, EntityClass::Line) => {
            let (s0, e0) = line_of(pb)?;
            signed_line_distance(point_of(pa, a.sel)?, s0, e0)
        }
        (EntityClass::Line, EntityClass::Point) => {
            let (s0, e0) = line_of(pa)?;
            signed_line_distance(point_of(pb, b.sel)?, s0, e0)
        }
        (EntityClass::Line, EntityClass::Line) => {
            let (a0, a1) = line_of(pa)?;
            let (b0, b1) = line_of(pb)?;
            let u = (a1 - a0).normalized()?;
            let v = (b1 - b0).normalized()?;
            if u.cross(v).abs() > 1e-9 {
                return None;
            }
            signed_line_distance(b0.lerp(b1, 0.5), a0, a1)
        }
        _ => None,
    }
}

/// Greedy selection from the enumerated candidates.
pub fn infer_constraints(s: &Sketch, policy: &dyn RankingPolicy, dof_target: usize) -> Vec<Constraint> {
    infer_constraints_with(s, policy, dof_target, &EnumerationOptions::default())
}

/// [`infer_constraints`] with explicit enumeration options.
pub fn infer_constraints_with(
    s: &Sketch,
    policy: &dyn RankingPolicy,
    dof_target: usize,
    opts: &EnumerationOptions,
) -> Vec<Constraint> {
    select(s, enumerate_candidates_with(s, opts), policy, dof_target)
}

fn select(s: &Sketch, cands: Vec<Candidate>, policy: &dyn RankingPolicy, dof_target: usize) -> Vec<Constraint> {
    let total = s.total_dof();
    if cands.is_empty() || dof_target >= total {
        return Vec::new();
    }
    let graph = ConstraintGraph::build_unchecked(s);
    let index = s.index_map();
    let nodes = |c: &Constraint| -> Vec<usize> {
        c.locals
            .iter()
            .filter_map(|r| graph.node_of(*index.get(r.primitive.as_str())?, r.selector))
            .collect()
    };
    let mut order: Vec<(u32, f64, Vec<usize>, usize)> = cands
        .iter()
        .enumerate()
        .filter_map(|(i, c)| {
            let prio = policy.priority(c, s)?;
            let res = if c.residual <= 1e-12 { 0.0 } else { c.residual };
            Some((prio, res, nodes(&c.constraint), i))
        })
        .collect();
    order.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)).then(a.3.cmp(&b.3)));

    let mut probe = s.clone();
    probe.constraints = cands.iter().map(|c| c.constraint.clone()).collect();
    let Ok(sys) = System::new(&probe, &HashSet::new()) else {
        return Vec::new();
    };
    let x = sys.initial();
    let jac = sys.jacobian(&x);
    let mut offsets = Vec::with_capacity(cands.len());
    let mut row = 0;
    for i in 0..cands.len() {
        offsets.push(row);
        row += sys.arity(i);
    }
    let mut tracker = RankTracker::new(x.len());
    let mut remaining = total;
    let mut picked = Vec::new();
    for (_, _, _, i) in order {
        let rows = jac.rows(offsets[i], sys.arity(i)).into_owned();
        let gain = tracker.gain(&rows);
        if gain == 0 || remaining < dof_target + gain {
            continue;
        }
        tracker.add(&rows);
        remaining -= gain;
        picked.push(i);
        if remaining == dof_target {
            break;
        }
    }
    picked.sort_unstable();
    picked.into_iter().map(|i| cands[i].constraint.clone()).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EvalMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl EvalMetrics {
    pub fn from_counts(hits: usize, predicted: usize, truth: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(hits, predicted);
        let recall = ratio(hits, truth);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        EvalMetrics { precision, recall, f1 }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("ground truth has no constraints")]
    EmptyGroundTruth,
}

pub fn evaluate_prediction(predicted: &[Constraint], ground_truth: &[Constraint]) -> Result<EvalMetrics, EvalError> {
    let gt: HashSet<ConstraintKey> = ground_truth.iter().map(ConstraintKey::of).collect();
    if gt.is_empty() {
        return Err(EvalError::EmptyGroundTruth);
    }
    let pred: HashSet<ConstraintKey> = predicted.iter().map(ConstraintKey::of).collect();
    let hits = pred.intersection(&gt).count();
    Ok(EvalMetrics::from_counts(hits, pred.len(), gt.len()))
}

/// Whether enumeration can produce a constraint at all.
pub fn is_enumerable(c: &Constraint) -> bool {
    ENUMERATED_TYPES.contains(&c.kind)
        && c.locals.len() <= 2
        && match c.kind {
            ConstraintType::Length | ConstraintType::Distance => {
                c.direction.unwrap_or(Direction::Minimum) == Direction::Minimum
            }
            _ => true,
        }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CorpusEvaluation {
    pub evaluated: usize,
    pub skipped_empty: usize,
    /// Unweighted means over evaluated sketches.
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Enumerable ground-truth constraints found among candidates.
    pub enumeration_hits: usize,
    pub enumerable_truth: usize,
}

impl CorpusEvaluation {
    pub fn enumeration_recall(&self) -> f64 {
        if self.enumerable_truth == 0 {
            1.0
        } else {
            self.enumeration_hits as f64 / self.enumerable_truth as f64
        }
    }
}

/// Per-sketch outcome of stripping constraints and inferring them again.
#[derive(Clone, Debug, PartialEq)]
pub struct SketchEvaluation {
    pub id: String,
    pub predicted: Vec<Constraint>,
    pub metrics: Option<EvalMetrics>,
    pub enumeration_hits: usize,
    pub enumerable_truth: usize,
}

pub fn evaluate_sketch(s: &Sketch, policy: &dyn RankingPolicy, dof_target: usize) -> SketchEvaluation {
    let stripped = s.stripped();
    let cands = enumerate_candidates(&stripped, ENUMERATION_TOLERANCE);
    let keys: HashSet<ConstraintKey> = cands.iter().map(|c| ConstraintKey::of(&c.constraint)).collect();
    let enumerable: HashSet<ConstraintKey> = s
        .constraints
        .iter()
        .filter(|c| is_enumerable(c))
        .map(ConstraintKey::of)
        .collect();
    let enumeration_hits = enumerable.iter().filter(|k| keys.contains(k)).count();
    let predicted = select(&stripped, cands, policy, dof_target);
    SketchEvaluation {
        id: s.id.clone(),
        metrics: evaluate_prediction(&predicted, &s.constraints).ok(),
        predicted,
        enumeration_hits,
        enumerable_truth: enumerable.len(),
    }
}

/// Evaluate every sketch in parallel and aggregate in id order.
pub fn evaluate_corpus(sketches: &[Sketch], policy: &dyn RankingPolicy, dof_target: usize) -> CorpusEvaluation {
    let mut results: Vec<SketchEvaluation> = sketches
        .par_iter()
        .map(|s| evaluate_sketch(s, policy, dof_target))
        .collect();
    results.sort_by(|a, b| a.id.cmp(&b.id));
    aggregate(&results)
}

/// Mean metrics over `(predicted, ground truth)` constraint lists, for
/// predictions made elsewhere. Enumeration counts stay zero.
pub fn evaluate_pairs<'a, I>(pairs: I) -> CorpusEvaluation
where
    I: IntoIterator<Item = (&'a [Constraint], &'a [Constraint])>,
{
    let results: Vec<SketchEvaluation> = pairs
        .into_iter()
        .map(|(pred, gt)| SketchEvaluation {
            id: String::new(),
            predicted: Vec::new(),
            metrics: evaluate_prediction(pred, gt).ok(),
            enumeration_hits: 0,
            enumerable_truth: 0,
        })
        .collect();
    aggregate(&results)
}

pub fn aggregate(results: &[SketchEvaluation]) -> CorpusEvaluation {
    let mut out = CorpusEvaluation::default();
    for r in results {
        out.enumeration_hits += r.enumeration_hits;
        out.enumerable_truth += r.enumerable_truth;
        match r.metrics {
            Some(m) => {
                out.evaluated += 1;
                out.precision += m.precision;
                out.recall += m.recall;
                out.f1 += m.f1;
            }
            None => out.skipped_empty += 1,
        }
    }
    if out.evaluated > 0 {
        let n = out.evaluated as f64;
        out.precision /= n;
        out.recall /= n;
        out.f1 /= n;
    }
    out
}

#[cfg(test)]
mod tests;
