//! Numeric constraint solving.
//!
//! [`solve`] finds geometry satisfying every constraint while staying close to
//! the stored configuration. It minimizes
//! `sum ||r(x)||^2 + s * lambda * ||x - x0||^2` with damped Gauss-Newton steps
//! (damping x10 on a rejected step, /10 on an accepted one) and shrinks the
//! anchor scale `s` over a few rounds, ending at zero. Warm-starting each
//! round makes the result track the constrained minimizer of the anchor
//! distance, so among many valid configurations the one nearest the input
//! wins. [`edit_propagate`] reuses the same machinery with heavy anchors on
//! the primitives being dragged.

pub mod dual;
mod lm;
pub mod residual;
mod system;

use std::collections::HashSet;

use nalgebra::DVector;
use thiserror::Error;

use crate::model::{ConstraintType, PrimitiveType, Sketch, SketchError, StandardPrimitive};
pub use lm::StepRecord;
pub use residual::{EntityClass, TangentBranch};
pub use system::{primitive_values, single_residuals, primitive_with_values, System, VariableLayout};

use crate::model::Constraint;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("primitive type {0} is not supported by the solver")]
    UnsupportedPrimitive(PrimitiveType),
    #[error("{kind} is not supported between {detail}")]
    UnsupportedConstraint { kind: ConstraintType, detail: String },
    #[error("{kind} has no target value")]
    MissingValue { kind: ConstraintType },
    #[error("reference {0} does not resolve")]
    DanglingReference(String),
    #[error("unknown primitive id {0:?}")]
    UnknownPrimitive(String),
    #[error("edit target for {id:?} does not match its type")]
    InvalidEdit { id: String },
    #[error("invalid solver options: {0}")]
    InvalidOptions(&'static str),
    #[error(transparent)]
    Sketch(#[from] SketchError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Largest absolute constraint residual accepted as solved, in meters or
    /// radians.
    pub residual_tolerance: f64,
    pub max_iterations: usize,
    /// Weight pulling free variables toward their starting values.
    pub anchor_weight: f64,
    pub damping_init: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            residual_tolerance: 1e-8,
            max_iterations: 200,
            anchor_weight: 1e-4,
            damping_init: 1e-3,
        }
    }
}

impl SolveOptions {
    pub fn check(&self) -> Result<(), SolveError> {
        if !(self.residual_tolerance > 0.0) {
            return Err(SolveError::InvalidOptions("residual tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(SolveError::InvalidOptions("max iterations must be positive"));
        }
        if !(self.anchor_weight >= 0.0) {
            return Err(SolveError::InvalidOptions("anchor weight must be non-negative"));
        }
        if !(self.damping_init > 0.0) {
            return Err(SolveError::InvalidOptions("initial damping must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub solved_sketch: Sketch,
    pub converged: bool,
    pub iterations: usize,
    pub max_abs_residual: f64,
    pub per_constraint_residuals: Vec<Vec<f64>>,
    /// Objective value after every accepted step, tagged by anchor round.
    pub history: Vec<StepRecord>,
}

/// Residual vector of one constraint evaluated on the sketch's stored
/// geometry.
pub fn residuals(c: &Constraint, sketch: &Sketch) -> Result<Vec<f64>, SolveError> {
    system::single_residuals(c, sketch, &sketch.index_map())
}

/// Whether every residual of `c` is within `tol`.
pub fn is_satisfied(c: &Constraint, sketch: &Sketch, tol: f64) -> Result<bool, SolveError> {
    Ok(residuals(c, sketch)?.iter().all(|r| r.abs() <= tol))
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, r| m.max(r.abs()))
}

fn fixed_indices(sketch: &Sketch, fixed: &[&str]) -> Result<HashSet<usize>, SolveError> {
    fixed
        .iter()
        .map(|id| sketch.primitive_index(id).ok_or_else(|| SolveError::UnknownPrimitive(id.to_string())))
        .collect()
}

/// Solve all constraints of `sketch`, holding the primitives named in
/// `fixed` in place.
pub fn solve(sketch: &Sketch, fixed: &[&str], opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    opts.check()?;
    sketch.validate()?;
    let fixed = fixed_indices(sketch, fixed)?;
    let sys = System::new(sketch, &fixed)?;
    let x0 = sys.initial();
    let weights = DVector::from_element(x0.len(), opts.anchor_weight);
    run(&sys, x0.clone(), x0, weights, opts)
}

/// A requested move of one primitive.
#[derive(Clone, Debug, PartialEq)]
pub struct Edit {
    pub primitive: String,
    pub target: StandardPrimitive,
    pub stiffness: f64,
}

impl Edit {
    pub const DEFAULT_STIFFNESS: f64 = 1e3;

    pub fn new(primitive: impl Into<String>, target: StandardPrimitive) -> Self {
        Edit {
            primitive: primitive.into(),
            target,
            stiffness: Self::DEFAULT_STIFFNESS,
        }
    }
}

/// Re-solve after pulling edited primitives toward their targets. Constraints
/// stay hard; unedited primitives are anchored with the ordinary weight.
pub fn edit_propagate(
    sketch: &Sketch,
    edits: &[Edit],
    fixed: &[&str],
    opts: &SolveOptions,
) -> Result<SolveResult, SolveError> {
    if edits.is_empty() {
        return solve(sketch, fixed, opts);
    }
    opts.check()?;
    sketch.validate()?;
    let fixed = fixed_indices(sketch, fixed)?;
    let sys = System::new(sketch, &fixed)?;
    let x0 = sys.initial();
    let mut target = x0.clone();
    let mut weights = DVector::from_element(x0.len(), opts.anchor_weight);
    for e in edits {
        let pi = sketch
            .primitive_index(&e.primitive)
            .ok_or_else(|| SolveError::UnknownPrimitive(e.primitive.clone()))?;
        let slot = sys
            .layout
            .slot(pi)
            .ok_or_else(|| SolveError::InvalidEdit { id: e.primitive.clone() })?;
        let current = &x0.as_slice()[slot.clone()];
        let vals = target_values(&sys, pi, &e.target, current)
            .ok_or_else(|| SolveError::InvalidEdit { id: e.primitive.clone() })?;
        for (k, v) in vals.into_iter().enumerate() {
            target[slot.start + k] = v;
            weights[slot.start + k] = e.stiffness;
        }
    }
    run(&sys, x0, target, weights, opts)
}

/// Solver variables for a standard-form target, with arc angles unwrapped
/// next to the current parameters.
fn target_values(sys: &System, pi: usize, target: &StandardPrimitive, current: &[f64]) -> Option<Vec<f64>> {
    use StandardPrimitive as S;
    let kind = sys.kind(pi);
    match (kind, target) {
        (PrimitiveType::Point, S::Point(p)) => Some(vec![p.x, p.y]),
        (PrimitiveType::Line, S::Line { start, end }) => Some(vec![start.x, start.y, end.x, end.y]),
        (PrimitiveType::Circle, S::Circle { center, radius }) => Some(vec![center.x, center.y, *radius]),
        (
            PrimitiveType::Arc,
            S::Arc {
                center,
                radius,
                start,
                end,
                ..
            },
        ) => {
            let f = sys.frame(pi)?;
            let param = |p: crate::Vec2, near: f64| {
                let raw = f.sense * ((p - *center).angle() - f.base);
                let tau = std::f64::consts::TAU;
                raw + tau * ((near - raw) / tau).round()
            };
            Some(vec![
                center.x,
                center.y,
                *radius,
                param(*start, current[3]),
                param(*end, current[4]),
            ])
        }
        _ => None,
    }
}

/// Anchor scales applied round by round.
const ANCHOR_SCALES: [f64; 6] = [1.0, 1e-3, 1e-6, 1e-9, 1e-12, 0.0];

fn run(
    sys: &System,
    x0: DVector<f64>,
    target: DVector<f64>,
    weights: DVector<f64>,
    opts: &SolveOptions,
) -> Result<SolveResult, SolveError> {
    let tol = opts.residual_tolerance;
    let mut x = x0;
    let mut history = Vec::new();
    let mut iterations = 0;
    let edited = target != x;
    let mut r = sys.residuals(&x);
    if edited || max_abs(&r) > tol {
        let mut lm = lm::Lm::new(sys, &target, &weights, opts);
        for (round, &scale) in ANCHOR_SCALES.iter().enumerate() {
            if iterations >= opts.max_iterations {
                break;
            }
            let out = lm.round(&mut x, scale, round, opts.max_iterations - iterations, &mut history);
            iterations += out;
            r = sys.residuals(&x);
            if max_abs(&r) <= tol && (!edited || scale == 0.0 || round > 0) {
                break;
            }
        }
    }
    let max_abs_residual = max_abs(&r);
    Ok(SolveResult {
        solved_sketch: sys.apply(&x),
        converged: max_abs_residual <= tol,
        iterations,
        max_abs_residual,
        per_constraint_residuals: sys.residual_blocks(&x),
        history,
    })
}
