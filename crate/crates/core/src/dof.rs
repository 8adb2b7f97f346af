//! Degrees-of-freedom accounting.
//!
//! A constraint removes as many degrees of freedom as its residual vector has
//! components, so counting and solving never disagree. Redundant constraints
//! still count, which is how over-constrained sketches show up.

use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::model::{Constraint, Sketch};
use crate::solver::{single_residuals, System};

/// Per-constraint DOF removal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DofCount {
    Counted(usize),
    /// The solver has no residual for this constraint; it removes nothing.
    Uncounted,
}

impl DofCount {
    pub fn removed(self) -> usize {
        match self {
            DofCount::Counted(n) => n,
            DofCount::Uncounted => 0,
        }
    }
}

pub fn constraint_dof_removed(c: &Constraint, s: &Sketch) -> DofCount {
    dof_removed_indexed(c, s, &s.index_map())
}

fn dof_removed_indexed(c: &Constraint, s: &Sketch, index: &std::collections::HashMap<&str, usize>) -> DofCount {
    match single_residuals(c, s, index) {
        Ok(r) => DofCount::Counted(r.len()),
        Err(_) => DofCount::Uncounted,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DofReport {
    pub total_dof: usize,
    pub removed_dof: usize,
    pub remaining_dof: usize,
    pub over_constrained: bool,
    /// Constraints that contributed nothing because the solver cannot
    /// express them.
    pub uncounted: usize,
}

impl DofReport {
    pub fn new(total_dof: usize, removed_dof: usize) -> Self {
        DofReport {
            total_dof,
            removed_dof,
            remaining_dof: total_dof.saturating_sub(removed_dof),
            over_constrained: removed_dof > total_dof,
            uncounted: 0,
        }
    }
}

pub fn sketch_dof_report(s: &Sketch) -> DofReport {
    let index = s.index_map();
    let mut removed = 0;
    let mut uncounted = 0;
    for c in &s.constraints {
        match dof_removed_indexed(c, s, &index) {
            DofCount::Counted(n) => removed += n,
            DofCount::Uncounted => uncounted += 1,
        }
    }
    DofReport {
        uncounted,
        ..DofReport::new(s.total_dof(), removed)
    }
}

/// Free DOF according to the rank of the constraint Jacobian. Diagnostic
/// only; returns `None` when some constraint is outside the solver.
pub fn jacobian_rank_dof(s: &Sketch) -> Option<usize> {
    let sys = System::new(s, &Default::default()).ok()?;
    let x = sys.initial();
    let rank = if sys.rows() == 0 || x.is_empty() {
        0
    } else {
        sys.jacobian(&x).svd(false, false).rank(RankTracker::TOLERANCE)
    };
    let unsolved: usize = s
        .primitives
        .iter()
        .filter(|p| !p.kind().is_solver_supported())
        .map(|p| p.dof())
        .sum();
    Some(x.len() - rank + unsolved)
}

/// Incrementally tracks the rank of a growing set of Jacobian rows with
/// modified Gram-Schmidt.
#[derive(Clone, Debug)]
pub struct RankTracker {
    basis: Vec<DVector<f64>>,
    dim: usize,
}

impl RankTracker {
    /// Relative norm below which a row counts as dependent.
    pub const TOLERANCE: f64 = 1e-9;

    pub fn new(dim: usize) -> Self {
        RankTracker { basis: Vec::new(), dim }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Rank increase the rows would cause, without committing them.
    pub fn gain(&self, rows: &DMatrix<f64>) -> usize {
        self.clone().add(rows)
    }

    /// Add rows and return the rank increase.
    pub fn add(&mut self, rows: &DMatrix<f64>) -> usize {
        let before = self.basis.len();
        for row in rows.row_iter() {
            let mut v: DVector<f64> = row.transpose();
            let scale = v.amax();
            if scale == 0.0 {
                continue;
            }
            // two passes keep the projection accurate
            for _ in 0..2 {
                for b in &self.basis {
                    let k = b.dot(&v);
                    v.axpy(-k, b, 1.0);
                }
            }
            let n = v.norm();
            if n > Self::TOLERANCE * scale {
                self.basis.push(v / n);
            }
        }
        self.basis.len() - before
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum DofError {
    #[error("correlation needs at least two sketches, got {0}")]
    TooFewSketches(u64),
    #[error("total or removed DOF has zero variance")]
    DegenerateVariance,
}

/// Streaming Pearson correlation; partial results merge exactly.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Pearson {
    n: u64,
    mean_x: f64,
    mean_y: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

impl Pearson {
    pub fn push(&mut self, x: f64, y: f64) {
        self.n += 1;
        let n = self.n as f64;
        let dx = x - self.mean_x;
        let dy = y - self.mean_y;
        self.mean_x += dx / n;
        self.mean_y += dy / n;
        self.sxx += dx * (x - self.mean_x);
        self.syy += dy * (y - self.mean_y);
        self.sxy += dx * (y - self.mean_y);
    }

    pub fn merge(&mut self, o: &Pearson) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let (na, nb) = (self.n as f64, o.n as f64);
        let n = na + nb;
        let dx = o.mean_x - self.mean_x;
        let dy = o.mean_y - self.mean_y;
        self.sxx += o.sxx + dx * dx * na * nb / n;
        self.syy += o.syy + dy * dy * na * nb / n;
        self.sxy += o.sxy + dx * dy * na * nb / n;
        self.mean_x += dx * nb / n;
        self.mean_y += dy * nb / n;
        self.n += o.n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn coefficient(&self) -> Result<f64, DofError> {
        if self.n < 2 {
            return Err(DofError::TooFewSketches(self.n));
        }
        let scale = self.sxx.abs().max(self.syy.abs()).max(1.0);
        if self.sxx <= 1e-12 * scale || self.syy <= 1e-12 * scale {
            return Err(DofError::DegenerateVariance);
        }
        Ok((self.sxy / (self.sxx * self.syy).sqrt()).clamp(-1.0, 1.0))
    }
}

/// Pearson r between total and removed DOF across reports.
pub fn dof_correlation<'a, I>(reports: I) -> Result<f64, DofError>
where
    I: IntoIterator<Item = &'a DofReport>,
{
    let mut acc = Pearson::default();
    for r in reports {
        acc.push(r.total_dof as f64, r.removed_dof as f64);
    }
    acc.coefficient()
}

/// One line per sketch: id, total, removed, remaining.
pub fn write_dof_tsv<'a, W, I>(mut w: W, rows: I) -> io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = (&'a str, DofReport)>,
{
    writeln!(w, "id\ttotal\tremoved\tremaining")?;
    for (id, r) in rows {
        writeln!(w, "{id}\t{}\t{}\t{}", r.total_dof, r.removed_dof, r.remaining_dof)?;
    }
    Ok(())
}
