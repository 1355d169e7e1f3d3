//! Exhaustive enumeration of every plan the decoder can produce.
//!
//! A plan is fixed by the four priority orders and one frequency per open DC,
//! so walking every permutation of DCs, retailers and both fleets, and every
//! feasible frequency at each DC, visits the whole decodable space.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use itertools::Itertools;
use rayon::prelude::*;

use super::{ExactBackend, ExactError, ScalarWeights, Solution};
use crate::decoder::{DecodeOptions, Plan, PlanBuilder, Priorities};
use crate::evaluation::{Evaluator, ObjectivePair, DEFAULT_PENALTY_RATE};
use crate::front::Front;
use crate::instance::Instance;

/// Spaces beyond this many priority/frequency combinations are refused.
pub const MAX_SPACE: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumerationOptions {
    pub n_max: u32,
    pub max_space: f64,
    pub deadline: Option<Instant>,
}

impl EnumerationOptions {
    pub fn new(n_max: u32) -> Self {
        EnumerationOptions {
            n_max: n_max.max(1),
            max_space: MAX_SPACE,
            deadline: None,
        }
    }
}

/// Distinct feasible plans with their objectives.
#[derive(Debug, Clone, Default)]
pub struct Enumeration {
    pub solutions: Vec<Solution>,
    /// Set when the deadline stopped the walk early.
    pub incomplete: bool,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Upper bound on the number of leaves the walk visits.
pub fn space_size(instance: &Instance, n_max: u32) -> f64 {
    let s = instance.size();
    factorial(s.dcs)
        * factorial(s.retailers)
        * factorial(s.vehicles_in)
        * factorial(s.vehicles_out)
        * f64::from(n_max.max(1)).powi(s.dcs as i32)
}

fn walk(builder: PlanBuilder<'_>, out: &mut Vec<Plan>) {
    if builder.current_dc().is_none() {
        out.push(builder.finish());
        return;
    }
    let freqs = builder.feasible_frequencies();
    if freqs.is_empty() {
        let mut b = builder;
        b.commit(None);
        walk(b, out);
        return;
    }
    for n in freqs {
        let mut b = builder.clone();
        b.commit(Some(n));
        walk(b, out);
    }
}

fn plan_key(plan: &Plan) -> String {
    serde_json::to_string(plan).expect("plans serialize")
}

/// Every distinct feasible plan reachable by the decoder.
pub fn enumerate_space(instance: &Instance, opts: &EnumerationOptions) -> Result<Enumeration, ExactError> {
    let size = space_size(instance, opts.n_max);
    if size > opts.max_space {
        return Err(ExactError::SpaceTooLarge { size });
    }
    let s = instance.size();
    let decode = DecodeOptions::new(opts.n_max);
    let evaluator = Evaluator::new(instance, decode, DEFAULT_PENALTY_RATE);
    let perms = |n: usize| -> Vec<Vec<usize>> { (0..n).permutations(n).collect() };
    let (dc_perms, ret_perms, in_perms, out_perms) =
        (perms(s.dcs), perms(s.retailers), perms(s.vehicles_in), perms(s.vehicles_out));
    let stopped = AtomicBool::new(false);

    let outer: Vec<(&Vec<usize>, &Vec<usize>)> = dc_perms.iter().cartesian_product(ret_perms.iter()).collect();
    let found: HashMap<String, Plan> = outer
        .par_iter()
        .map(|&(dc, ret)| {
            let mut local: HashMap<String, Plan> = HashMap::new();
            if opts.deadline.is_some_and(|d| Instant::now() >= d) {
                stopped.store(true, Ordering::Relaxed);
                return local;
            }
            let mut leaves = Vec::new();
            for vin in &in_perms {
                for vout in &out_perms {
                    let prio = Priorities {
                        dc: dc.clone(),
                        retailer: ret.clone(),
                        inbound: vin.clone(),
                        outbound: vout.clone(),
                    };
                    leaves.clear();
                    walk(PlanBuilder::new(instance, &decode, &prio), &mut leaves);
                    for plan in leaves.drain(..) {
                        if plan.is_feasible() {
                            local.entry(plan_key(&plan)).or_insert(plan);
                        }
                    }
                }
            }
            local
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                a.entry(k).or_insert(v);
            }
            a
        });

    let mut keyed: Vec<(String, Plan)> = found.into_iter().collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let solutions = keyed
        .into_iter()
        .map(|(_, plan)| Solution {
            objectives: evaluator.objectives_of(&plan),
            plan,
        })
        .collect();
    Ok(Enumeration {
        solutions,
        incomplete: stopped.load(Ordering::Relaxed),
    })
}

impl Enumeration {
    /// The Pareto front of the enumerated plans.
    pub fn front(&self, seed: u64) -> Front {
        let candidates = self
            .solutions
            .iter()
            .map(|s| (s.objectives, Some(s.plan.clone())))
            .collect();
        let mut front = Front::from_candidates("ENUM", seed, candidates);
        front.incomplete = self.incomplete;
        front
    }
}

/// Pareto front of the full decodable space.
pub fn enumerate_pareto(instance: &Instance, opts: &EnumerationOptions) -> Result<Front, ExactError> {
    Ok(enumerate_space(instance, opts)?.front(0))
}

/// Answers scalarized queries by scanning an enumeration.
#[derive(Debug, Clone)]
pub struct EnumerationBackend {
    space: Enumeration,
}

impl EnumerationBackend {
    pub fn new(space: Enumeration) -> Self {
        EnumerationBackend { space }
    }

    pub fn build(instance: &Instance, opts: &EnumerationOptions) -> Result<Self, ExactError> {
        Ok(Self::new(enumerate_space(instance, opts)?))
    }

    pub fn space(&self) -> &Enumeration {
        &self.space
    }
}

impl ExactBackend for EnumerationBackend {
    fn minimize(&self, weights: ScalarWeights, z1_max: f64, z2_max: f64) -> Result<Option<Solution>, ExactError> {
        let score = |p: &ObjectivePair| weights.w1 * p.z1 + weights.w2 * p.z2;
        let best = self
            .space
            .solutions
            .iter()
            .filter(|s| s.objectives.z1 <= z1_max && s.objectives.z2 <= z2_max)
            .min_by(|a, b| {
                let (pa, pb) = (&a.objectives, &b.objectives);
                score(pa)
                    .total_cmp(&score(pb))
                    .then(pa.z1.total_cmp(&pb.z1))
                    .then(pa.z2.total_cmp(&pb.z2))
            });
        Ok(best.cloned())
    }
}
