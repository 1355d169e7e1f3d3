//! Approximation sets returned by the solvers and their JSON form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decoder::Plan;
use crate::evaluation::ObjectivePair;
use crate::moea::dominance::dominates;

pub const FRONT_SCHEMA: u32 = 1;

/// Points closer than this (relative) are treated as the same point.
pub const DUPLICATE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum FrontError {
    #[error("invalid front JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported front schema {0}")]
    Schema(u32),
    #[error("front point {0} is not finite")]
    NonFinite(usize),
    #[error("front point {0} dominates point {1}")]
    Dominated(usize, usize),
    #[error("front point {0} duplicates point {1}")]
    Duplicate(usize, usize),
    #[error("{plans} plans for {points} points")]
    PlanCount { plans: usize, points: usize },
}

/// A plan with its objective values, as persisted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord {
    #[serde(flatten)]
    pub plan: Plan,
    pub objectives: ObjectivePair,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Front {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_id: Option<String>,
    pub algorithm: String,
    pub seed: u64,
    /// Sorted by ascending `z1`.
    pub points: Vec<ObjectivePair>,
    /// Either empty or one plan per point.
    #[serde(default)]
    pub plans: Vec<PlanRecord>,
    /// Set when a time limit cut the search short.
    #[serde(default)]
    pub incomplete: bool,
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= DUPLICATE_TOL * x.abs().max(y.abs()).max(1.0)
}

pub(crate) fn near(a: &ObjectivePair, b: &ObjectivePair) -> bool {
    close(a.z1, b.z1) && close(a.z2, b.z2)
}

impl Front {
    pub fn empty(algorithm: impl Into<String>, seed: u64) -> Self {
        Front {
            schema: FRONT_SCHEMA,
            instance_id: None,
            algorithm: algorithm.into(),
            seed,
            points: Vec::new(),
            plans: Vec::new(),
            incomplete: false,
        }
    }

    /// Keeps the non-dominated candidates, one per distinct point, sorted by `z1`.
    /// Ties between identical points keep the earliest candidate. Objective
    /// values within the duplicate tolerance count as equal, so a point that
    /// only wins by rounding noise in one objective does not survive.
    pub fn from_candidates(algorithm: impl Into<String>, seed: u64, candidates: Vec<(ObjectivePair, Option<Plan>)>) -> Self {
        let mut order: Vec<usize> = (0..candidates.len()).collect();
        order.sort_by(|&a, &b| {
            let (pa, pb) = (&candidates[a].0, &candidates[b].0);
            pa.z1.total_cmp(&pb.z1).then(pa.z2.total_cmp(&pb.z2)).then(a.cmp(&b))
        });
        let mut kept: Vec<usize> = Vec::new();
        let mut best_z2 = f64::INFINITY;
        for i in order {
            let p = &candidates[i].0;
            if !(p.z1.is_finite() && p.z2.is_finite()) {
                continue;
            }
            if let Some(&last) = kept.last() {
                if near(&candidates[last].0, p) {
                    continue;
                }
            }
            if kept.is_empty() || (p.z2 < best_z2 && !close(p.z2, best_z2)) {
                // A near-equal z1 with lower z2 replaces the previous point.
                while let Some(&last) = kept.last() {
                    if close(candidates[last].0.z1, p.z1) {
                        kept.pop();
                    } else {
                        break;
                    }
                }
                kept.push(i);
                best_z2 = p.z2;
            }
        }
        let mut front = Front::empty(algorithm, seed);
        let mut candidates: Vec<Option<(ObjectivePair, Option<Plan>)>> = candidates.into_iter().map(Some).collect();
        let with_plans = kept.iter().all(|&i| candidates[i].as_ref().is_some_and(|c| c.1.is_some()));
        for i in kept {
            let (point, plan) = candidates[i].take().expect("index kept once");
            front.points.push(point);
            if with_plans {
                let plan = plan.expect("checked above");
                front.plans.push(PlanRecord {
                    feasible: plan.is_feasible(),
                    plan,
                    objectives: point,
                });
            }
        }
        front
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Checks the structural invariants.
    pub fn validate(&self) -> Result<(), FrontError> {
        if self.schema != FRONT_SCHEMA {
            return Err(FrontError::Schema(self.schema));
        }
        for (i, p) in self.points.iter().enumerate() {
            if !(p.z1.is_finite() && p.z2.is_finite()) {
                return Err(FrontError::NonFinite(i));
            }
        }
        for i in 0..self.points.len() {
            for j in 0..self.points.len() {
                if i == j {
                    continue;
                }
                if j > i && near(&self.points[i], &self.points[j]) {
                    return Err(FrontError::Duplicate(j, i));
                }
                if dominates(&self.points[i], &self.points[j]) {
                    return Err(FrontError::Dominated(i, j));
                }
            }
        }
        if !self.plans.is_empty() && self.plans.len() != self.points.len() {
            return Err(FrontError::PlanCount {
                plans: self.plans.len(),
                points: self.points.len(),
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("front serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, FrontError> {
        let front: Front = serde_json::from_str(text)?;
        front.validate()?;
        Ok(front)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(z1: f64, z2: f64) -> ObjectivePair {
        ObjectivePair::new(z1, z2)
    }

    #[test]
    fn candidates_are_filtered_and_sorted() {
        let f = Front::from_candidates(
            "test",
            0,
            vec![(p(3.0, 1.0), None), (p(1.0, 3.0), None), (p(2.0, 2.0), None), (p(2.5, 2.5), None), (p(1.0, 3.0), None)],
        );
        assert_eq!(f.points, vec![p(1.0, 3.0), p(2.0, 2.0), p(3.0, 1.0)]);
        assert!(f.plans.is_empty());
        f.validate().unwrap();
    }

    #[test]
    fn near_duplicates_collapse() {
        let f = Front::from_candidates("t", 0, vec![(p(1.0, 2.0), None), (p(1.0 + 1e-12, 2.0), None)]);
        assert_eq!(f.len(), 1);
    }

    #[test]
    fn rounding_noise_does_not_keep_weak_points() {
        let z1 = 17002.493616313;
        let f = Front::from_candidates(
            "t",
            0,
            vec![(p(z1 - 4e-12, 1088.68), None), (p(z1, 1079.24), None), (p(z1 + 50.0, 1079.24 - 1e-10), None)],
        );
        assert_eq!(f.points, vec![p(z1, 1079.24)]);
    }

    #[test]
    fn json_round_trip() {
        let f = Front::from_candidates("t", 4, vec![(p(1.0, 2.0), None), (p(2.0, 1.0), None)]);
        assert_eq!(Front::from_json(&f.to_json()).unwrap(), f);
    }

    #[test]
    fn dominated_json_rejected() {
        let mut f = Front::empty("t", 0);
        f.points = vec![p(1.0, 1.0), p(2.0, 2.0)];
        assert!(matches!(Front::from_json(&f.to_json()), Err(FrontError::Dominated(0, 1))));
    }
}
