use super::Candidate;
use crate::model::{ConstraintType as T, Sketch};

/// Orders candidates for greedy selection. Lower priorities are tried
/// first; `None` drops the candidate.
pub trait RankingPolicy: Sync {
    fn priority(&self, candidate: &Candidate, sketch: &Sketch) -> Option<u32>;
}

/// Fixed tiers: coincidence, then horizontal/vertical, then the other
/// geometric relations, then equality, then dimensions. Point-to-point
/// coincidences go ahead of point-on-curve ones, and horizontal/vertical on
/// a line ahead of the same relation between two points.
#[derive(Clone, Copy, Debug, Default)]
pub struct PriorityPolicy;

impl RankingPolicy for PriorityPolicy {
    fn priority(&self, candidate: &Candidate, sketch: &Sketch) -> Option<u32> {
        let c = &candidate.constraint;
        Some(match c.kind {
            T::Coincident => {
                let all_points = c.locals.iter().all(|r| {
                    r.selector.is_some()
                        || sketch
                            .primitive(&r.primitive)
                            .is_some_and(|p| p.kind() == crate::model::PrimitiveType::Point)
                });
                if all_points {
                    0
                } else {
                    1
                }
            }
            T::Horizontal | T::Vertical => 10 + (c.locals.len() > 1) as u32,
            T::Parallel | T::Perpendicular | T::Tangent | T::Concentric | T::Midpoint => 20,
            T::Equal => 30,
            T::Radius | T::Diameter | T::Length | T::Distance => 40,
            _ => return None,
        })
    }
}
