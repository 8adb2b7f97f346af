//! Variable layout and residual/Jacobian assembly for one sketch.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::ops::Range;

use nalgebra::{DMatrix, DVector};

use super::dual::{Dual, MAX_LOCAL_VARS};
use super::residual::{
    constraint_residuals, pick_tangent_branch, resolve, state_from_values, ArcFrame, Entity,
    PrimState, TangentBranch,
};
use super::SolveError;
use crate::model::{
    angular_sense, dof_of_primitive, from_standard, Constraint, Geometry, Primitive, PrimitiveType, Selector,
    Sketch, StandardPrimitive,
};
use crate::Vec2;

/// Solver variables of a primitive, or `None` for unsupported types.
pub fn primitive_values(p: &Primitive) -> Option<Vec<f64>> {
    match &p.geometry {
        Geometry::Point { x, y } => Some(vec![*x, *y]),
        Geometry::Line { .. } => match p.to_standard().ok()? {
            StandardPrimitive::Line { start, end } => Some(vec![start.x, start.y, end.x, end.y]),
            _ => None,
        },
        Geometry::Circle {
            x_center,
            y_center,
            radius,
            ..
        } => Some(vec![*x_center, *y_center, *radius]),
        Geometry::Arc {
            x_center,
            y_center,
            radius,
            start_param,
            end_param,
            ..
        } => Some(vec![*x_center, *y_center, *radius, *start_param, *end_param]),
        _ => None,
    }
}

pub fn arc_frame(p: &Primitive) -> Option<ArcFrame> {
    match p.geometry {
        Geometry::Arc {
            x_dir, y_dir, clockwise, ..
        } => Some(ArcFrame {
            base: y_dir.atan2(x_dir),
            sense: angular_sense(clockwise),
        }),
        _ => None,
    }
}

/// Rebuild a primitive from solver variables, keeping direction vectors and
/// orientation flags of the original where the type has them.
pub fn primitive_with_values(p: &Primitive, v: &[f64]) -> Primitive {
    let mut out = p.clone();
    out.geometry = match &p.geometry {
        Geometry::Point { .. } => Geometry::Point { x: v[0], y: v[1] },
        Geometry::Line { .. } => {
            let std = StandardPrimitive::Line {
                start: Vec2::new(v[0], v[1]),
                end: Vec2::new(v[2], v[3]),
            };
            // collapsed lines keep their last valid form
            from_standard(&std).unwrap_or_else(|_| p.geometry.clone())
        }
        Geometry::Circle {
            x_dir, y_dir, clockwise, ..
        } => Geometry::Circle {
            x_center: v[0],
            y_center: v[1],
            x_dir: *x_dir,
            y_dir: *y_dir,
            radius: v[2].abs(),
            clockwise: *clockwise,
        },
        Geometry::Arc {
            x_dir, y_dir, clockwise, ..
        } => {
            let s = angular_sense(*clockwise);
            let (r, shift) = if v[2] < 0.0 { (-v[2], s * PI) } else { (v[2], 0.0) };
            Geometry::Arc {
                x_center: v[0],
                y_center: v[1],
                x_dir: *x_dir,
                y_dir: *y_dir,
                radius: r,
                clockwise: *clockwise,
                start_param: v[3] + shift,
                end_param: v[4] + shift,
            }
        }
        g => g.clone(),
    };
    out
}

/// Residuals of one constraint on stored geometry, resolving references
/// through `index`.
pub fn single_residuals(
    c: &Constraint,
    sketch: &Sketch,
    index: &std::collections::HashMap<&str, usize>,
) -> Result<Vec<f64>, SolveError> {
    let mut states: Vec<(usize, PrimState<f64>)> = Vec::new();
    let mut ents = Vec::with_capacity(c.locals.len());
    for r in &c.locals {
        let pi = *index
            .get(r.primitive.as_str())
            .ok_or_else(|| SolveError::DanglingReference(r.to_string()))?;
        let p = &sketch.primitives[pi];
        if !p.kind().is_solver_supported() {
            return Err(SolveError::UnsupportedPrimitive(p.kind()));
        }
        let st = match states.iter().find(|(i, _)| *i == pi) {
            Some((_, st)) => *st,
            None => {
                let vals = primitive_values(p).ok_or(SolveError::UnsupportedPrimitive(p.kind()))?;
                let st = state_from_values(p.kind(), &vals, arc_frame(p));
                states.push((pi, st));
                st
            }
        };
        ents.push(resolve(&st, r.selector));
    }
    constraint_residuals(c, &ents, pick_tangent_branch(&ents))
}

/// Flat vector of free scalar parameters with a primitive -> slice map.
#[derive(Clone, Debug, PartialEq)]
pub struct VariableLayout {
    slots: Vec<Option<Range<usize>>>,
    len: usize,
}

impl VariableLayout {
    pub fn new(sketch: &Sketch, fixed: &HashSet<usize>) -> Self {
        let mut slots = Vec::with_capacity(sketch.primitives.len());
        let mut len = 0;
        for (i, p) in sketch.primitives.iter().enumerate() {
            if fixed.contains(&i) || !p.kind().is_solver_supported() {
                slots.push(None);
            } else {
                let n = dof_of_primitive(p.kind());
                slots.push(Some(len..len + n));
                len += n;
            }
        }
        VariableLayout { slots, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn slot(&self, primitive: usize) -> Option<Range<usize>> {
        self.slots.get(primitive).cloned().flatten()
    }
}

#[derive(Clone, Debug)]
struct Plan {
    /// Distinct primitives referenced, in first-use order.
    prims: Vec<usize>,
    /// For each local: index into `prims` and selector.
    locals: Vec<(usize, Option<Selector>)>,
    branch: TangentBranch,
    arity: usize,
}

/// The residual system of a sketch with some primitives held fixed.
#[derive(Clone, Debug)]
pub struct System<'a> {
    pub sketch: &'a Sketch,
    pub layout: VariableLayout,
    values: Vec<Option<Vec<f64>>>,
    frames: Vec<Option<ArcFrame>>,
    plans: Vec<Plan>,
    rows: usize,
}

impl<'a> System<'a> {
    pub fn new(sketch: &'a Sketch, fixed: &HashSet<usize>) -> Result<Self, SolveError> {
        let layout = VariableLayout::new(sketch, fixed);
        let values: Vec<Option<Vec<f64>>> = sketch.primitives.iter().map(primitive_values).collect();
        let frames: Vec<Option<ArcFrame>> = sketch.primitives.iter().map(arc_frame).collect();
        let index = sketch.index_map();
        let mut plans = Vec::with_capacity(sketch.constraints.len());
        for c in &sketch.constraints {
            let mut prims: Vec<usize> = Vec::new();
            let mut locals = Vec::new();
            for r in &c.locals {
                let pi = *index
                    .get(r.primitive.as_str())
                    .ok_or_else(|| SolveError::DanglingReference(r.to_string()))?;
                let kind = sketch.primitives[pi].kind();
                if !kind.is_solver_supported() {
                    return Err(SolveError::UnsupportedPrimitive(kind));
                }
                let slot = match prims.iter().position(|&p| p == pi) {
                    Some(s) => s,
                    None => {
                        prims.push(pi);
                        prims.len() - 1
                    }
                };
                locals.push((slot, r.selector));
            }
            let mut plan = Plan {
                prims,
                locals,
                branch: TangentBranch::External,
                arity: 0,
            };
            let ents = entities_f64(sketch, &values, &frames, &plan, None);
            plan.branch = pick_tangent_branch(&ents);
            plan.arity = constraint_residuals(c, &ents, plan.branch)?.len();
            plans.push(plan);
        }
        let rows = plans.iter().map(|p| p.arity).sum();
        Ok(System {
            sketch,
            layout,
            values,
            frames,
            plans,
            rows,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn arity(&self, constraint: usize) -> usize {
        self.plans[constraint].arity
    }

    /// Initial variable vector taken from the stored sketch.
    pub fn initial(&self) -> DVector<f64> {
        let mut x = DVector::zeros(self.layout.len());
        for (i, v) in self.values.iter().enumerate() {
            if let (Some(slot), Some(v)) = (self.layout.slot(i), v) {
                x.rows_mut(slot.start, slot.len()).copy_from_slice(v);
            }
        }
        x
    }

    fn prim_vals<'x>(&'x self, p: usize, x: &'x DVector<f64>) -> &'x [f64] {
        match self.layout.slot(p) {
            Some(slot) => &x.as_slice()[slot],
            None => self.values[p].as_deref().expect("supported primitive"),
        }
    }

    fn constraint(&self, i: usize) -> &Constraint {
        &self.sketch.constraints[i]
    }

    /// Residuals of every constraint, concatenated in constraint order.
    pub fn residuals(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.rows);
        let mut row = 0;
        for (ci, plan) in self.plans.iter().enumerate() {
            let ents = entities_f64(self.sketch, &self.values, &self.frames, plan, Some((self, x)));
            let r = constraint_residuals(self.constraint(ci), &ents, plan.branch).expect("checked at build");
            for v in r {
                out[row] = v;
                row += 1;
            }
        }
        out
    }

    /// Residual blocks per constraint.
    pub fn residual_blocks(&self, x: &DVector<f64>) -> Vec<Vec<f64>> {
        let r = self.residuals(x);
        let mut row = 0;
        self.plans
            .iter()
            .map(|p| {
                let block = r.as_slice()[row..row + p.arity].to_vec();
                row += p.arity;
                block
            })
            .collect()
    }

    /// Exact Jacobian by forward-mode differentiation.
    pub fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut jac = DMatrix::zeros(self.rows, self.layout.len());
        let mut row = 0;
        for (ci, plan) in self.plans.iter().enumerate() {
            let mut cols = Vec::with_capacity(MAX_LOCAL_VARS);
            let states: Vec<PrimState<Dual>> = plan
                .prims
                .iter()
                .map(|&p| {
                    let vals = self.prim_vals(p, x);
                    let slot = self.layout.slot(p);
                    let duals: Vec<Dual> = vals
                        .iter()
                        .enumerate()
                        .map(|(k, &v)| match &slot {
                            Some(s) => {
                                cols.push(s.start + k);
                                Dual::variable(v, cols.len() - 1)
                            }
                            None => Dual::constant(v),
                        })
                        .collect();
                    state_from_values(self.sketch.primitives[p].kind(), &duals, self.frames[p])
                })
                .collect();
            let ents: Vec<Entity<Dual>> = plan.locals.iter().map(|&(s, sel)| resolve(&states[s], sel)).collect();
            let r = constraint_residuals(self.constraint(ci), &ents, plan.branch).expect("checked at build");
            for v in r {
                for (k, &col) in cols.iter().enumerate() {
                    jac[(row, col)] += v.d[k];
                }
                row += 1;
            }
        }
        jac
    }

    /// Write variables back into a copy of the sketch. Primitives whose
    /// variables are unchanged are copied verbatim.
    pub fn apply(&self, x: &DVector<f64>) -> Sketch {
        let mut out = self.sketch.clone();
        for (i, p) in out.primitives.iter_mut().enumerate() {
            if let (Some(slot), Some(orig)) = (self.layout.slot(i), &self.values[i]) {
                let v = &x.as_slice()[slot];
                if v != orig.as_slice() {
                    *p = primitive_with_values(p, v);
                }
            }
        }
        out
    }

    pub fn frame(&self, p: usize) -> Option<ArcFrame> {
        self.frames[p]
    }

    pub fn kind(&self, p: usize) -> PrimitiveType {
        self.sketch.primitives[p].kind()
    }
}

fn entities_f64(
    sketch: &Sketch,
    values: &[Option<Vec<f64>>],
    frames: &[Option<ArcFrame>],
    plan: &Plan,
    current: Option<(&System, &DVector<f64>)>,
) -> Vec<Entity<f64>> {
    let states: Vec<PrimState<f64>> = plan
        .prims
        .iter()
        .map(|&p| {
            let vals: &[f64] = match current {
                Some((sys, x)) => sys.prim_vals(p, x),
                None => values[p].as_deref().expect("supported primitive"),
            };
            state_from_values(sketch.primitives[p].kind(), vals, frames[p])
        })
        .collect();
    plan.locals.iter().map(|&(s, sel)| resolve(&states[s], sel)).collect()
}
