//! Evolutionary solvers over the random-key encoding: NSGA-II, NRGA,
//! SPEA2 and PESA-II. They share the variation operators, dominance
//! utilities and a function-evaluation budget.

pub mod dominance;
mod nsga2;
mod nrga;
mod pesa2;
pub mod runlog;
mod spea2;
pub mod variation;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decoder::{Chromosome, DecodeOptions};
use crate::evaluation::{Evaluator, ObjectivePair, DEFAULT_PENALTY_RATE};
use crate::front::Front;
use crate::instance::Instance;

pub use nrga::{rbrw_probability, RbrwWheel};
pub use pesa2::{Archive as PesaArchive, Admission};
pub use spea2::{raw_fitness, spea2_fitness};

#[derive(Debug, Error, PartialEq)]
pub enum MoeaError {
    #[error("invalid algorithm configuration: {0}")]
    Config(String),
    #[error("rank {rank} outside 1..={n}")]
    Rank { rank: usize, n: usize },
    #[error("unknown algorithm {0:?}")]
    UnknownAlgorithm(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Algorithm {
    Nsga2,
    Nrga,
    Spea2,
    Pesa2,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Nsga2, Algorithm::Nrga, Algorithm::Spea2, Algorithm::Pesa2];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Nsga2 => "NSGA2",
            Algorithm::Nrga => "NRGA",
            Algorithm::Spea2 => "SPEA2",
            Algorithm::Pesa2 => "PESA2",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = MoeaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_uppercase();
        match norm.as_str() {
            "NSGA2" | "NSGAII" => Ok(Algorithm::Nsga2),
            "NRGA" => Ok(Algorithm::Nrga),
            "SPEA2" | "SPEAII" => Ok(Algorithm::Spea2),
            "PESA2" | "PESAII" => Ok(Algorithm::Pesa2),
            _ => Err(MoeaError::UnknownAlgorithm(s.to_string())),
        }
    }
}

/// Default function-evaluation budget for full-scale runs.
pub const DEFAULT_FE_BUDGET: u64 = 300_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmConfig {
    pub algorithm: Algorithm,
    pub population_size: usize,
    /// Used by SPEA2 and PESA2.
    pub archive_size: usize,
    pub crossover_fraction: f64,
    pub mutation_fraction: f64,
    pub mutation_rate: f64,
    /// PESA2 parent tournament size.
    pub selection_pressure: usize,
    /// PESA2 eviction tournament size.
    pub deletion_pressure: usize,
    /// PESA2 hyperboxes per objective.
    pub grid_divisions: usize,
    pub fe_budget: u64,
    pub seed: u64,
}

impl AlgorithmConfig {
    /// Tuned defaults of each algorithm.
    pub fn defaults(algorithm: Algorithm) -> Self {
        let base = AlgorithmConfig {
            algorithm,
            population_size: 100,
            archive_size: 100,
            crossover_fraction: 0.7,
            mutation_fraction: 0.3,
            mutation_rate: 0.03,
            selection_pressure: 2,
            deletion_pressure: 2,
            grid_divisions: 10,
            fe_budget: DEFAULT_FE_BUDGET,
            seed: 0,
        };
        match algorithm {
            Algorithm::Nsga2 => base,
            Algorithm::Nrga => AlgorithmConfig {
                population_size: 150,
                mutation_fraction: 0.2,
                mutation_rate: 0.05,
                ..base
            },
            Algorithm::Spea2 => AlgorithmConfig {
                archive_size: 300,
                crossover_fraction: 0.9,
                mutation_fraction: 0.2,
                ..base
            },
            Algorithm::Pesa2 => AlgorithmConfig {
                mutation_fraction: 0.2,
                mutation_rate: 0.05,
                selection_pressure: 3,
                deletion_pressure: 3,
                ..base
            },
        }
    }

    pub fn with_budget(mut self, fe_budget: u64) -> Self {
        self.fe_budget = fe_budget;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), MoeaError> {
        let err = |m: String| Err(MoeaError::Config(m));
        for (name, v) in [
            ("crossover_fraction", self.crossover_fraction),
            ("mutation_fraction", self.mutation_fraction),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return err(format!("{name} = {v} outside [0, 1]"));
            }
        }
        if self.population_size < 2 {
            return err(format!("population_size = {} below 2", self.population_size));
        }
        if self.fe_budget < self.population_size as u64 {
            return err(format!(
                "fe_budget = {} below population_size = {}",
                self.fe_budget, self.population_size
            ));
        }
        let (n_cross, n_mut) = variation::offspring_counts(self);
        if n_cross + n_mut == 0 {
            return err("crossover and mutation fractions produce no offspring".into());
        }
        if matches!(self.algorithm, Algorithm::Spea2 | Algorithm::Pesa2) && self.archive_size == 0 {
            return err("archive_size must be positive".into());
        }
        if self.algorithm == Algorithm::Pesa2 {
            if self.selection_pressure == 0 || self.deletion_pressure == 0 {
                return err("tournament pressures must be positive".into());
            }
            if self.grid_divisions == 0 {
                return err("grid_divisions must be positive".into());
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, MoeaError> {
        let cfg: AlgorithmConfig = serde_json::from_str(text).map_err(|e| MoeaError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Population member with per-generation scratch values.
#[derive(Debug, Clone)]
pub struct Individual {
    pub chromosome: Chromosome,
    pub objectives: ObjectivePair,
    /// Front index (0 = non-dominated).
    pub rank: usize,
    pub crowding: f64,
    /// SPEA2 fitness (lower is better).
    pub fitness: f64,
}

impl Individual {
    fn new(chromosome: Chromosome, objectives: ObjectivePair) -> Self {
        Individual {
            chromosome,
            objectives,
            rank: 0,
            crowding: 0.0,
            fitness: 0.0,
        }
    }
}

/// Snapshot handed to observers after initialization and each generation.
#[derive(Debug)]
pub struct GenerationReport<'a> {
    pub generation: usize,
    pub evaluations: u64,
    /// Current elite: first front, archive or external population.
    pub elite: &'a [ObjectivePair],
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub front: Front,
    pub evaluations: u64,
    pub generations: usize,
}

/// Budget bookkeeping and observer plumbing shared by all runners.
pub(crate) struct RunContext<'e, 'a, 'o> {
    pub ev: &'e Evaluator<'a>,
    pub cfg: &'e AlgorithmConfig,
    pub used: u64,
    pub generation: usize,
    deadline: Option<Instant>,
    timed_out: bool,
    observer: &'o mut dyn FnMut(&GenerationReport),
}

impl RunContext<'_, '_, '_> {
    pub fn evaluate(&mut self, chromosomes: Vec<Chromosome>) -> Vec<Individual> {
        self.used += chromosomes.len() as u64;
        let ev = self.ev;
        let objectives: Vec<ObjectivePair> = chromosomes.par_iter().map(|c| ev.evaluate(c)).collect();
        chromosomes
            .into_iter()
            .zip(objectives)
            .map(|(c, o)| Individual::new(c, o))
            .collect()
    }

    pub fn remaining(&self) -> usize {
        self.cfg.fe_budget.saturating_sub(self.used) as usize
    }

    /// True while budget and time allow another generation.
    pub fn proceed(&mut self) -> bool {
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
        }
        !self.timed_out && self.remaining() > 0
    }

    pub fn report(&mut self, elite: &[ObjectivePair]) {
        (self.observer)(&GenerationReport {
            generation: self.generation,
            evaluations: self.used,
            elite,
        });
    }

    pub fn key_count(&self) -> usize {
        self.ev.instance().key_count()
    }

    /// Decodes the elite, drops infeasible plans and builds the front.
    pub fn finish(self, elite: &[Individual]) -> RunOutcome {
        let ev = self.ev;
        let candidates = elite
            .par_iter()
            .filter_map(|ind| {
                let plan = ev.decode(&ind.chromosome);
                plan.is_feasible().then_some((ind.objectives, Some(plan)))
            })
            .collect();
        let mut front = Front::from_candidates(self.cfg.algorithm.name(), self.cfg.seed, candidates);
        front.incomplete = self.timed_out;
        RunOutcome {
            front,
            evaluations: self.used,
            generations: self.generation,
        }
    }
}

pub(crate) fn objectives_of(pop: &[Individual]) -> Vec<ObjectivePair> {
    pop.iter().map(|i| i.objectives).collect()
}

/// Runs the configured algorithm with an observer and optional deadline.
pub fn run_with(
    evaluator: &Evaluator,
    config: &AlgorithmConfig,
    deadline: Option<Instant>,
    observer: &mut dyn FnMut(&GenerationReport),
) -> Result<RunOutcome, MoeaError> {
    config.validate()?;
    let ctx = RunContext {
        ev: evaluator,
        cfg: config,
        used: 0,
        generation: 0,
        deadline,
        timed_out: false,
        observer,
    };
    Ok(match config.algorithm {
        Algorithm::Nsga2 => nsga2::run(ctx, nsga2::Selection::Tournament),
        Algorithm::Nrga => nsga2::run(ctx, nsga2::Selection::RankedRoulette),
        Algorithm::Spea2 => spea2::run(ctx),
        Algorithm::Pesa2 => pesa2::run(ctx),
    })
}

/// Runs the configured algorithm with default decoding and penalty.
pub fn run(instance: &Instance, config: &AlgorithmConfig) -> Result<RunOutcome, MoeaError> {
    let ev = Evaluator::new(instance, DecodeOptions::for_instance(instance), DEFAULT_PENALTY_RATE);
    run_with(&ev, config, None, &mut |_| {})
}

fn run_as(instance: &Instance, config: &AlgorithmConfig, algorithm: Algorithm) -> Result<Front, MoeaError> {
    let cfg = AlgorithmConfig {
        algorithm,
        ..config.clone()
    };
    run(instance, &cfg).map(|o| o.front)
}

pub fn run_nsga2(instance: &Instance, config: &AlgorithmConfig) -> Result<Front, MoeaError> {
    run_as(instance, config, Algorithm::Nsga2)
}

pub fn run_nrga(instance: &Instance, config: &AlgorithmConfig) -> Result<Front, MoeaError> {
    run_as(instance, config, Algorithm::Nrga)
}

pub fn run_spea2(instance: &Instance, config: &AlgorithmConfig) -> Result<Front, MoeaError> {
    run_as(instance, config, Algorithm::Spea2)
}

pub fn run_pesa2(instance: &Instance, config: &AlgorithmConfig) -> Result<Front, MoeaError> {
    run_as(instance, config, Algorithm::Pesa2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        for alg in Algorithm::ALL {
            AlgorithmConfig::defaults(alg).validate().unwrap();
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        let base = AlgorithmConfig::defaults(Algorithm::Nsga2);
        let bad = AlgorithmConfig {
            crossover_fraction: 1.5,
            ..base.clone()
        };
        assert!(bad.validate().is_err());
        let bad = AlgorithmConfig {
            population_size: 1,
            ..base.clone()
        };
        assert!(bad.validate().is_err());
        let bad = AlgorithmConfig { fe_budget: 10, ..base };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn algorithm_names_parse() {
        for alg in Algorithm::ALL {
            assert_eq!(alg.name().parse::<Algorithm>().unwrap(), alg);
        }
        assert_eq!("nsga-ii".parse::<Algorithm>().unwrap(), Algorithm::Nsga2);
        assert!("moead".parse::<Algorithm>().is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = AlgorithmConfig::defaults(Algorithm::Pesa2).with_seed(9);
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(AlgorithmConfig::from_json(&text).unwrap(), cfg);
    }
}
