use nalgebra::{DMatrix, DVector};

use super::system::System;
use super::SolveOptions;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    /// Index into the anchor schedule.
    pub round: usize,
    pub anchor_scale: f64,
    pub objective: f64,
}

const DAMPING_MAX: f64 = 1e16;
const DAMPING_MIN: f64 = 1e-15;
/// Relative objective gain that ends an anchored round.
const ANCHORED_REL_GAIN: f64 = 1e-10;

pub(super) struct Lm<'s, 'a> {
    sys: &'s System<'a>,
    target: &'s DVector<f64>,
    weights: &'s DVector<f64>,
    damping_init: f64,
    damping: f64,
    /// Constraint residual below which a round stops early.
    floor: f64,
}

impl<'s, 'a> Lm<'s, 'a> {
    pub fn new(sys: &'s System<'a>, target: &'s DVector<f64>, weights: &'s DVector<f64>, opts: &SolveOptions) -> Self {
        Lm {
            sys,
            target,
            weights,
            damping_init: opts.damping_init,
            damping: opts.damping_init,
            floor: opts.residual_tolerance * 1e-3,
        }
    }

    fn objective(&self, x: &DVector<f64>, scale: f64) -> Option<(DVector<f64>, f64)> {
        let r = self.sys.residuals(x);
        let mut cost = r.norm_squared();
        if scale > 0.0 {
            for i in 0..x.len() {
                let d = x[i] - self.target[i];
                cost += scale * self.weights[i] * d * d;
            }
        }
        cost.is_finite().then_some((r, cost))
    }

    /// Minimize at one anchor scale. Returns the number of trial steps.
    pub fn round(
        &mut self,
        x: &mut DVector<f64>,
        scale: f64,
        round: usize,
        budget: usize,
        history: &mut Vec<StepRecord>,
    ) -> usize {
        let n = x.len();
        self.damping = self.damping_init;
        let Some((mut r, mut cost)) = self.objective(x, scale) else {
            return 0;
        };
        let mut trials = 0;
        let mut fresh = true;
        let mut jtj = DMatrix::zeros(n, n);
        let mut grad = DVector::zeros(n);
        while trials < budget {
            if r.iter().all(|v| v.abs() <= self.floor) && scale == 0.0 {
                break;
            }
            if fresh {
                let j = self.sys.jacobian(x);
                jtj = j.tr_mul(&j);
                grad = j.tr_mul(&r);
                if scale > 0.0 {
                    for i in 0..n {
                        let w = scale * self.weights[i];
                        jtj[(i, i)] += w;
                        grad[i] += w * (x[i] - self.target[i]);
                    }
                }
                if grad.amax() <= 1e-30 {
                    break;
                }
                fresh = false;
            }
            trials += 1;
            let mut a = jtj.clone();
            for i in 0..n {
                a[(i, i)] += self.damping;
            }
            let step = match a.cholesky() {
                Some(ch) => ch.solve(&(-&grad)),
                None => {
                    self.damping = (self.damping * 10.0).min(DAMPING_MAX);
                    continue;
                }
            };
            let cand = &*x + &step;
            match self.objective(&cand, scale) {
                Some((rc, cc)) if cc < cost => {
                    let gain = cost - cc;
                    *x = cand;
                    r = rc;
                    cost = cc;
                    fresh = true;
                    self.damping = (self.damping / 10.0).max(DAMPING_MIN);
                    history.push(StepRecord {
                        round,
                        anchor_scale: scale,
                        objective: cost,
                    });
                    let xn = x.amax().max(1.0);
                    let rel = if scale > 0.0 { ANCHORED_REL_GAIN } else { 1e-16 };
                    if step.amax() <= 1e-15 * xn || gain <= rel * cost {
                        break;
                    }
                }
                _ => {
                    if self.damping >= DAMPING_MAX {
                        break;
                    }
                    self.damping = (self.damping * 10.0).min(DAMPING_MAX);
                }
            }
        }
        trials
    }
}
