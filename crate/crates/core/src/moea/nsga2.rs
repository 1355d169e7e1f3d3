//! Elitist rank-and-crowding loop shared by NSGA-II and NRGA; they differ
//! only in how parents are drawn.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dominance::{crowding_distance, non_dominated_sort};
use super::nrga::RbrwWheel;
use super::variation::{random_chromosome, variation, ChildMutation};
use super::{objectives_of, Individual, RunContext, RunOutcome};
use crate::evaluation::ObjectivePair;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Selection {
    /// Binary tournament on (rank, crowding).
    Tournament,
    /// Ranked roulette wheel over the global (rank, crowding) order.
    RankedRoulette,
}

/// `a` wins a crowded-comparison tournament against `b`.
pub(crate) fn crowded_better(a: &Individual, b: &Individual) -> bool {
    a.rank < b.rank || (a.rank == b.rank && a.crowding > b.crowding)
}

/// Sets rank and crowding on every member.
pub(crate) fn assign_rank_crowding(pop: &mut [Individual]) -> Vec<Vec<usize>> {
    let objs = objectives_of(pop);
    let fronts = non_dominated_sort(&objs);
    for (r, front) in fronts.iter().enumerate() {
        let cd = crowding_distance(&objs, front);
        for (&i, d) in front.iter().zip(cd) {
            pop[i].rank = r;
            pop[i].crowding = d;
        }
    }
    fronts
}

/// Keeps the best `size` members by front, then crowding. Repeats of an
/// objective vector already in the pool only fill places left over once
/// every distinct vector has been considered.
fn survive(pool: Vec<Individual>, size: usize) -> Vec<Individual> {
    let mut seen: Vec<ObjectivePair> = Vec::with_capacity(pool.len());
    let (mut unique, mut repeats): (Vec<Individual>, Vec<Individual>) = (Vec::new(), Vec::new());
    for ind in pool {
        if seen.contains(&ind.objectives) {
            repeats.push(ind);
        } else {
            seen.push(ind.objectives);
            unique.push(ind);
        }
    }
    let mut chosen = truncate(unique, size);
    if chosen.len() < size {
        let rest = size - chosen.len();
        chosen.extend(truncate(repeats, rest));
    }
    assign_rank_crowding(&mut chosen);
    chosen
}

/// Best `size` members of `pool` by front, then crowding.
fn truncate(mut pool: Vec<Individual>, size: usize) -> Vec<Individual> {
    if pool.len() <= size {
        return pool;
    }
    let fronts = assign_rank_crowding(&mut pool);
    let mut chosen = Vec::with_capacity(size);
    for front in fronts {
        if chosen.len() + front.len() <= size {
            chosen.extend(front);
        } else {
            let mut last = front;
            last.sort_by(|&a, &b| pool[b].crowding.total_cmp(&pool[a].crowding).then(a.cmp(&b)));
            chosen.extend(last.into_iter().take(size - chosen.len()));
        }
        if chosen.len() == size {
            break;
        }
    }
    let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
    chosen
        .into_iter()
        .map(|i| slots[i].take().expect("each index chosen once"))
        .collect()
}

fn first_front(pop: &[Individual]) -> Vec<Individual> {
    pop.iter().filter(|i| i.rank == 0).cloned().collect()
}

pub(crate) fn run(mut ctx: RunContext, selection: Selection) -> RunOutcome {
    let cfg = ctx.cfg;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let len = ctx.key_count();
    let init = (0..cfg.population_size)
        .map(|_| random_chromosome(len, &mut rng))
        .collect();
    let mut pop = ctx.evaluate(init);
    assign_rank_crowding(&mut pop);
    ctx.report(&objectives_of(&first_front(&pop)));

    while ctx.proceed() {
        let parents: Vec<_> = pop.iter().map(|i| i.chromosome.clone()).collect();
        let limit = ctx.remaining();
        let offspring = match selection {
            Selection::Tournament => variation(&parents, cfg, limit, &mut rng, ChildMutation::Off, |rng: &mut ChaCha8Rng| {
                let a = rng.gen_range(0..pop.len());
                let b = rng.gen_range(0..pop.len());
                if crowded_better(&pop[b], &pop[a]) {
                    b
                } else {
                    a
                }
            }),
            Selection::RankedRoulette => {
                let wheel = RbrwWheel::new(&pop);
                variation(&parents, cfg, limit, &mut rng, ChildMutation::Off, |rng: &mut ChaCha8Rng| wheel.sample(rng))
            }
        };
        let children = ctx.evaluate(offspring);
        pop.extend(children);
        pop = survive(pop, cfg.population_size);
        ctx.generation += 1;
        ctx.report(&objectives_of(&first_front(&pop)));
    }
    let elite = first_front(&pop);
    ctx.finish(&elite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::Chromosome;
    use crate::evaluation::ObjectivePair;

    fn ind(z1: f64, z2: f64) -> Individual {
        Individual::new(Chromosome::from_keys_unchecked(vec![0.5]), ObjectivePair::new(z1, z2))
    }

    #[test]
    fn survival_prefers_fronts_then_spread() {
        let pool = vec![
            ind(0.0, 4.0),
            ind(1.0, 3.0),
            ind(1.9, 2.1),
            ind(3.0, 1.0),
            ind(4.0, 0.0),
            ind(5.0, 5.0),
        ];
        let kept = survive(pool, 4);
        let objs: Vec<_> = kept.iter().map(|i| (i.objectives.z1, i.objectives.z2)).collect();
        assert!(objs.contains(&(0.0, 4.0)) && objs.contains(&(4.0, 0.0)));
        assert!(!objs.contains(&(5.0, 5.0)));
        assert_eq!(kept.len(), 4);
    }

    #[test]
    fn repeated_vectors_yield_to_distinct_ones() {
        let pool = vec![ind(0.0, 1.0), ind(0.0, 1.0), ind(0.0, 1.0), ind(2.0, 2.0), ind(3.0, 3.0)];
        let kept = survive(pool, 3);
        let objs: Vec<_> = kept.iter().map(|i| (i.objectives.z1, i.objectives.z2)).collect();
        assert_eq!(objs.iter().filter(|o| **o == (0.0, 1.0)).count(), 1);
        assert!(objs.contains(&(2.0, 2.0)) && objs.contains(&(3.0, 3.0)));
        assert_eq!(survive(vec![ind(0.0, 1.0), ind(0.0, 1.0)], 2).len(), 2);
    }
}
