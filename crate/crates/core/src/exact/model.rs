//! Sparse mixed-integer linear model container with a feasibility checker.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ExactError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarKind {
    Continuous,
    Integer,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lb: f64,
    pub ub: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

pub type Terms = Vec<(usize, f64)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub terms: Terms,
    pub sense: Sense,
    pub rhs: f64,
}

/// A violated bound, integrality requirement or row.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub what: String,
    pub amount: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MilpModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    /// Cost row then emission row.
    pub objectives: [Terms; 2],
    index: HashMap<String, usize>,
}

/// Sums duplicate indices and drops zero coefficients, keeping first-seen order.
pub fn normalize_terms(terms: impl IntoIterator<Item = (usize, f64)>) -> Terms {
    let mut out: Terms = Vec::new();
    let mut pos: HashMap<usize, usize> = HashMap::new();
    for (v, c) in terms {
        match pos.get(&v) {
            Some(&p) => out[p].1 += c,
            None => {
                pos.insert(v, out.len());
                out.push((v, c));
            }
        }
    }
    out.retain(|&(_, c)| c != 0.0);
    out
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lb: f64, ub: f64) -> Result<usize, ExactError> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(ExactError::Model(format!("duplicate variable {name}")));
        }
        let (lb, ub) = if kind == VarKind::Binary { (0.0, 1.0) } else { (lb, ub) };
        if lb > ub || lb.is_nan() || ub.is_nan() {
            return Err(ExactError::Model(format!("empty domain for {name}")));
        }
        let idx = self.variables.len();
        self.index.insert(name.clone(), idx);
        self.variables.push(Variable { name, kind, lb, ub });
        Ok(idx)
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn add_constraint(&mut self, name: impl Into<String>, terms: impl IntoIterator<Item = (usize, f64)>, sense: Sense, rhs: f64) {
        let terms = normalize_terms(terms);
        debug_assert!(terms.iter().all(|&(v, _)| v < self.variables.len()));
        self.constraints.push(Constraint {
            name: name.into(),
            terms,
            sense,
            rhs,
        });
    }

    pub fn set_objective(&mut self, which: usize, terms: impl IntoIterator<Item = (usize, f64)>) {
        self.objectives[which] = normalize_terms(terms);
    }

    pub fn row_value(terms: &[(usize, f64)], values: &[f64]) -> f64 {
        terms.iter().map(|&(v, c)| c * values[v]).sum()
    }

    pub fn objective_values(&self, values: &[f64]) -> (f64, f64) {
        (
            Self::row_value(&self.objectives[0], values),
            Self::row_value(&self.objectives[1], values),
        )
    }

    /// All violations beyond `tol`, scaled by the magnitude of each row.
    pub fn violations(&self, values: &[f64], tol: f64) -> Vec<Violation> {
        let mut out = Vec::new();
        if values.len() != self.variables.len() {
            out.push(Violation {
                what: format!("{} values for {} variables", values.len(), self.variables.len()),
                amount: f64::INFINITY,
            });
            return out;
        }
        for (v, &x) in self.variables.iter().zip(values) {
            let scale = tol * x.abs().max(1.0);
            if x < v.lb - scale || x > v.ub + scale {
                out.push(Violation {
                    what: format!("bound of {}", v.name),
                    amount: (v.lb - x).max(x - v.ub),
                });
            }
            if v.kind != VarKind::Continuous && (x - x.round()).abs() > tol {
                out.push(Violation {
                    what: format!("integrality of {}", v.name),
                    amount: (x - x.round()).abs(),
                });
            }
        }
        for c in &self.constraints {
            let lhs = Self::row_value(&c.terms, values);
            let magnitude = c
                .terms
                .iter()
                .map(|&(v, k)| (k * values[v]).abs())
                .fold(c.rhs.abs(), f64::max)
                .max(1.0);
            let excess = match c.sense {
                Sense::Le => lhs - c.rhs,
                Sense::Ge => c.rhs - lhs,
                Sense::Eq => (lhs - c.rhs).abs(),
            };
            if excess > tol * magnitude {
                out.push(Violation {
                    what: format!("row {}", c.name),
                    amount: excess,
                });
            }
        }
        out
    }

    pub fn check_feasible(&self, values: &[f64], tol: f64) -> Result<(), ExactError> {
        match self.violations(values, tol).into_iter().next() {
            None => Ok(()),
            Some(v) => Err(ExactError::Model(format!("{} violated by {}", v.what, v.amount))),
        }
    }

    pub fn count_prefix(&self, prefix: &str) -> usize {
        self.variables.iter().filter(|v| v.name.starts_with(prefix)).count()
    }
}
