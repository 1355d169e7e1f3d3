//! Augmented epsilon-constraint method with the early-exit/bypass rule.
//!
//! Cost is the primary objective; emissions are bounded by a grid of levels
//! from their worst Pareto value down to their best. Each subproblem minimizes
//! `z1 + (delta / r2) * z2` under `z2 <= e2`; the returned `z2` lets the loop
//! skip every level it already satisfies.

use super::{ExactBackend, ExactError, ScalarWeights, Solution};
use crate::evaluation::ObjectivePair;
use crate::front::Front;

pub const DEFAULT_DELTA: f64 = 1e-4;
pub const DEFAULT_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonOptions {
    pub grid_points: usize,
    pub delta: f64,
}

impl Default for EpsilonOptions {
    fn default() -> Self {
        EpsilonOptions {
            grid_points: DEFAULT_GRID_POINTS,
            delta: DEFAULT_DELTA,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EpsilonResult {
    /// Row 0 minimizes cost first, row 1 emissions first.
    pub payoff: [ObjectivePair; 2],
    pub solutions: Vec<Solution>,
    /// Subproblems solved after the payoff table.
    pub subproblems: usize,
}

impl EpsilonResult {
    pub fn front(&self, seed: u64) -> Front {
        let candidates = self
            .solutions
            .iter()
            .map(|s| (s.objectives, Some(s.plan.clone())))
            .collect();
        Front::from_candidates("EPSC", seed, candidates)
    }
}

fn lexicographic(backend: &dyn ExactBackend, first: usize) -> Result<Solution, ExactError> {
    let (primary, secondary) = if first == 0 {
        (ScalarWeights { w1: 1.0, w2: 0.0 }, ScalarWeights { w1: 0.0, w2: 1.0 })
    } else {
        (ScalarWeights { w1: 0.0, w2: 1.0 }, ScalarWeights { w1: 1.0, w2: 0.0 })
    };
    let inf = f64::INFINITY;
    let lead = backend.minimize(primary, inf, inf)?.ok_or(ExactError::Infeasible)?;
    let bound = lead.objectives.get(first);
    let (z1_max, z2_max) = if first == 0 { (bound, inf) } else { (inf, bound) };
    Ok(backend.minimize(secondary, z1_max, z2_max)?.unwrap_or(lead))
}

pub fn augmented_eps_constraint(backend: &dyn ExactBackend, opts: &EpsilonOptions) -> Result<EpsilonResult, ExactError> {
    if opts.grid_points < 2 {
        return Err(ExactError::Model("the grid needs at least two points".into()));
    }
    if !(opts.delta > 0.0 && opts.delta.is_finite()) {
        return Err(ExactError::Model(format!("delta must be positive, got {}", opts.delta)));
    }
    let cost_first = lexicographic(backend, 0)?;
    let emission_first = lexicographic(backend, 1)?;
    let payoff = [cost_first.objectives, emission_first.objectives];
    let z2_hi = cost_first.objectives.z2;
    let z2_lo = emission_first.objectives.z2;
    let range = z2_hi - z2_lo;
    let mut solutions = vec![cost_first, emission_first];
    let mut subproblems = 0;
    if range <= 0.0 {
        return Ok(EpsilonResult {
            payoff,
            solutions,
            subproblems,
        });
    }
    let step = range / (opts.grid_points - 1) as f64;
    let weights = ScalarWeights {
        w1: 1.0,
        w2: opts.delta / range,
    };
    let mut g = 0usize;
    while g < opts.grid_points {
        let e2 = if g + 1 == opts.grid_points { z2_lo } else { z2_hi - g as f64 * step };
        subproblems += 1;
        let Some(sol) = backend.minimize(weights, f64::INFINITY, e2)? else {
            break;
        };
        // Bypass every level the found point already satisfies.
        let level = |g: usize| if g + 1 == opts.grid_points { z2_lo } else { z2_hi - g as f64 * step };
        let skip = ((e2 - sol.objectives.z2) / step).floor().max(0.0) as usize;
        g += 1 + skip.saturating_sub(1);
        while g < opts.grid_points && level(g) >= sol.objectives.z2 {
            g += 1;
        }
        solutions.push(sol);
    }
    Ok(EpsilonResult {
        payoff,
        solutions,
        subproblems,
    })
}
