//! Exact reference solutions for small instances: the linearized model, an
//! LP-format exporter, exhaustive enumeration and the augmented
//! epsilon-constraint driver.

pub mod enumerate;
pub mod epsilon;
pub mod linearize;
pub mod lp;
pub mod milp;
pub mod model;

use thiserror::Error;

use crate::decoder::Plan;
use crate::evaluation::ObjectivePair;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("model error: {0}")]
    Model(String),
    #[error("bilinear bounds must be positive, got a = {a}, b = {b}")]
    NonPositiveBound { a: f64, b: f64 },
    #[error("{retailers} retailers exceed the subset cap of {cap}")]
    SubsetCap { retailers: usize, cap: usize },
    #[error("search space of {size:e} plans is too large to enumerate")]
    SpaceTooLarge { size: f64 },
    #[error("no feasible plan")]
    Infeasible,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("LP parse error at line {line}: {msg}")]
    LpParse { line: usize, msg: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// A plan with its objective values.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub objectives: ObjectivePair,
    pub plan: Plan,
}

/// Scalarized weights for `w1 * z1 + w2 * z2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarWeights {
    pub w1: f64,
    pub w2: f64,
}

/// Something that minimizes a weighted sum of the two objectives under upper
/// bounds on each.
pub trait ExactBackend {
    fn minimize(&self, weights: ScalarWeights, z1_max: f64, z2_max: f64) -> Result<Option<Solution>, ExactError>;
}

/// Placeholder for an external LP/MIP solver reading the exported model.
#[derive(Debug, Default, Clone, Copy)]
pub struct ExternalSolverBackend;

impl ExactBackend for ExternalSolverBackend {
    fn minimize(&self, _: ScalarWeights, _: f64, _: f64) -> Result<Option<Solution>, ExactError> {
        Err(ExactError::Unsupported(
            "no MIP solver is linked; export the model with the LP writer instead".into(),
        ))
    }
}
