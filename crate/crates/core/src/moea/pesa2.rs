//! Region-based selection over a hyperbox grid laid on the external archive.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dominance::dominates;
use super::variation::{random_chromosome, variation, ChildMutation};
use super::{objectives_of, Individual, RunContext, RunOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admission {
    /// Dominated by an archive member, or a copy of one.
    Rejected,
    /// Entered; `evicted` members left (dominated ones plus any overflow).
    Inserted { evicted: usize },
}

/// Bounded archive of mutually non-dominated individuals.
#[derive(Debug, Clone)]
pub struct Archive {
    members: Vec<Individual>,
    capacity: usize,
    divisions: usize,
    deletion_pressure: usize,
}

impl Archive {
    pub fn new(capacity: usize, divisions: usize, deletion_pressure: usize) -> Self {
        Archive {
            members: Vec::new(),
            capacity: capacity.max(1),
            divisions: divisions.max(1),
            deletion_pressure: deletion_pressure.max(1),
        }
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Hyperbox index of every member over the archive's current ranges.
    pub fn boxes(&self) -> Vec<usize> {
        let objs = objectives_of(&self.members);
        let d = self.divisions;
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &objs {
            for m in 0..2 {
                lo[m] = lo[m].min(p.get(m));
                hi[m] = hi[m].max(p.get(m));
            }
        }
        let cell = |v: f64, m: usize| -> usize {
            let span = hi[m] - lo[m];
            if span <= 0.0 {
                0
            } else {
                (((v - lo[m]) / span * d as f64) as usize).min(d - 1)
            }
        };
        objs.iter().map(|p| cell(p.z1, 0) * d + cell(p.z2, 1)).collect()
    }

    /// Occupied boxes with their member positions, in first-seen order.
    fn occupancy(&self) -> Vec<Vec<usize>> {
        let boxes = self.boxes();
        let mut ids: Vec<usize> = Vec::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (pos, b) in boxes.into_iter().enumerate() {
            match ids.iter().position(|&x| x == b) {
                Some(g) => groups[g].push(pos),
                None => {
                    ids.push(b);
                    groups.push(vec![pos]);
                }
            }
        }
        groups
    }

    /// Offers a candidate; admitted iff no member dominates it and no member
    /// carries the same chromosome. Members tied in objectives are kept so the
    /// search can drift across plateaus.
    pub fn offer<R: Rng + ?Sized>(&mut self, candidate: Individual, rng: &mut R) -> Admission {
        let c = candidate.objectives;
        if self
            .members
            .iter()
            .any(|m| dominates(&m.objectives, &c) || m.chromosome == candidate.chromosome)
        {
            return Admission::Rejected;
        }
        let before = self.members.len();
        self.members.retain(|m| !dominates(&c, &m.objectives));
        let mut evicted = before - self.members.len();
        self.members.push(candidate);
        if self.members.len() > self.capacity {
            self.evict(rng);
            evicted += 1;
        }
        Admission::Inserted { evicted }
    }

    /// Removes a random member of the most crowded of `deletion_pressure`
    /// randomly drawn occupied boxes.
    fn evict<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let groups = self.occupancy();
        let mut best: Option<&Vec<usize>> = None;
        for _ in 0..self.deletion_pressure {
            let g = &groups[rng.gen_range(0..groups.len())];
            if best.is_none_or(|b| g.len() > b.len()) {
                best = Some(g);
            }
        }
        let victim = *best.expect("at least one draw").choose(rng).expect("occupied box");
        self.members.remove(victim);
    }
}

/// Parent sampler over a fixed snapshot of the archive's boxes.
struct RegionSelector {
    groups: Vec<Vec<usize>>,
    pressure: usize,
}

impl RegionSelector {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut best: Option<&Vec<usize>> = None;
        for _ in 0..self.pressure {
            let g = &self.groups[rng.gen_range(0..self.groups.len())];
            if best.is_none_or(|b| g.len() < b.len()) {
                best = Some(g);
            }
        }
        *best.expect("at least one draw").choose(rng).expect("occupied box")
    }
}

pub(crate) fn run(mut ctx: RunContext) -> RunOutcome {
    let cfg = ctx.cfg;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let len = ctx.key_count();
    let mut archive = Archive::new(cfg.archive_size, cfg.grid_divisions, cfg.deletion_pressure);
    let init = (0..cfg.population_size)
        .map(|_| random_chromosome(len, &mut rng))
        .collect();
    for ind in ctx.evaluate(init) {
        archive.offer(ind, &mut rng);
    }
    ctx.report(&objectives_of(archive.members()));
    while ctx.proceed() {
        let parents: Vec<_> = archive.members().iter().map(|i| i.chromosome.clone()).collect();
        let selector = RegionSelector {
            groups: archive.occupancy(),
            pressure: cfg.selection_pressure,
        };
        let limit = ctx.remaining();
        let offspring = variation(&parents, cfg, limit, &mut rng, ChildMutation::On, |rng: &mut ChaCha8Rng| selector.sample(rng));
        for ind in ctx.evaluate(offspring) {
            archive.offer(ind, &mut rng);
        }
        ctx.generation += 1;
        ctx.report(&objectives_of(archive.members()));
    }
    let elite = archive.members().to_vec();
    ctx.finish(&elite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::Chromosome;
    use crate::evaluation::ObjectivePair;

    fn ind(z1: f64, z2: f64) -> Individual {
        keyed(0.5, z1, z2)
    }

    fn keyed(key: f64, z1: f64, z2: f64) -> Individual {
        Individual::new(Chromosome::from_keys_unchecked(vec![key]), ObjectivePair::new(z1, z2))
    }

    #[test]
    fn admission_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut a = Archive::new(10, 10, 3);
        assert_eq!(a.offer(ind(2.0, 2.0), &mut rng), Admission::Inserted { evicted: 0 });
        assert_eq!(a.offer(keyed(0.1, 3.0, 3.0), &mut rng), Admission::Rejected);
        assert_eq!(a.offer(ind(2.0, 2.0), &mut rng), Admission::Rejected);
        assert_eq!(a.offer(keyed(0.2, 2.0, 2.0), &mut rng), Admission::Inserted { evicted: 0 });
        assert_eq!(a.offer(keyed(0.3, 1.0, 3.0), &mut rng), Admission::Inserted { evicted: 0 });
        assert_eq!(a.offer(keyed(0.4, 1.0, 1.0), &mut rng), Admission::Inserted { evicted: 3 });
        assert_eq!(a.len(), 1);
    }

    #[test]
    fn overflow_evicts_from_crowded_box() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut a = Archive::new(3, 2, 10);
        for (k, p) in [(0.0, 10.0), (0.1, 9.9), (0.2, 9.8), (10.0, 0.0)].into_iter().enumerate() {
            a.offer(keyed(0.1 + 0.1 * k as f64, p.0, p.1), &mut rng);
        }
        assert_eq!(a.len(), 3);
        assert!(a.members().iter().any(|m| m.objectives.z1 == 10.0));
    }
}
