//! Blend crossover and resampling mutation over random keys.

use rand::distributions::Open01;
use rand::Rng;

use super::AlgorithmConfig;
use crate::decoder::Chromosome;

/// Per-gene arithmetic blend; returns both complementary children.
pub fn blend_crossover<R: Rng + ?Sized>(p1: &[f64], p2: &[f64], rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = Vec::with_capacity(p1.len());
    let mut c2 = Vec::with_capacity(p1.len());
    for (&a, &b) in p1.iter().zip(p2) {
        let lambda: f64 = rng.gen();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        c1.push((lambda * a + (1.0 - lambda) * b).clamp(lo, hi));
        c2.push(((1.0 - lambda) * a + lambda * b).clamp(lo, hi));
    }
    (c1, c2)
}

/// Resamples each key in place with probability `rate`; true if any changed.
pub fn resample<R: Rng + ?Sized>(keys: &mut [f64], rate: f64, rng: &mut R) -> bool {
    let mut changed = false;
    if rate <= 0.0 {
        return changed;
    }
    for key in keys.iter_mut() {
        if rng.gen::<f64>() < rate {
            *key = rng.sample(Open01);
            changed = true;
        }
    }
    changed
}

/// Resamples each key with probability `rate`. With `rate > 0` at least
/// one key changes so the mutant is never a plain copy.
pub fn mutate<R: Rng + ?Sized>(parent: &[f64], rate: f64, rng: &mut R) -> Vec<f64> {
    let mut child = parent.to_vec();
    if rate <= 0.0 || child.is_empty() {
        return child;
    }
    if !resample(&mut child, rate, rng) {
        let j = rng.gen_range(0..child.len());
        child[j] = rng.sample(Open01);
    }
    child
}

/// Offspring counts `(crossover children, mutants)` for one generation.
pub fn offspring_counts(cfg: &AlgorithmConfig) -> (usize, usize) {
    let pop = cfg.population_size as f64;
    let n_cross = 2 * (cfg.crossover_fraction * pop / 2.0).round() as usize;
    let n_mut = (cfg.mutation_fraction * pop).round() as usize;
    (n_cross, n_mut)
}

/// Whether crossover children also pass through per-key resampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChildMutation {
    Off,
    On,
}

/// Builds up to `limit` offspring, drawing parents with `select`.
pub fn variation<R, S>(
    parents: &[Chromosome],
    cfg: &AlgorithmConfig,
    limit: usize,
    rng: &mut R,
    child_mutation: ChildMutation,
    mut select: S,
) -> Vec<Chromosome>
where
    R: Rng + ?Sized,
    S: FnMut(&mut R) -> usize,
{
    let (n_cross, n_mut) = offspring_counts(cfg);
    let cross_limit = n_cross.min(limit);
    let mut out = Vec::with_capacity((n_cross + n_mut).min(limit));
    while out.len() < cross_limit {
        let a = select(rng);
        let b = select(rng);
        let (mut c1, mut c2) = blend_crossover(parents[a].keys(), parents[b].keys(), rng);
        if child_mutation == ChildMutation::On {
            resample(&mut c1, cfg.mutation_rate, rng);
            resample(&mut c2, cfg.mutation_rate, rng);
        }
        out.push(Chromosome::from_keys_unchecked(c1));
        if out.len() < cross_limit {
            out.push(Chromosome::from_keys_unchecked(c2));
        }
    }
    for _ in 0..n_mut {
        if out.len() >= limit {
            break;
        }
        let a = select(rng);
        out.push(Chromosome::from_keys_unchecked(mutate(
            parents[a].keys(),
            cfg.mutation_rate,
            rng,
        )));
    }
    out
}

/// Fresh chromosome with uniform keys.
pub fn random_chromosome<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Chromosome {
    Chromosome::from_keys_unchecked((0..len).map(|_| rng.sample(Open01)).collect())
}
