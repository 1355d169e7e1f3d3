//! Strength-based fitness, k-th nearest neighbour density and archive
//! truncation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dominance::dominates;
use super::variation::{random_chromosome, variation, ChildMutation};
use super::{objectives_of, Individual, RunContext, RunOutcome};
use crate::evaluation::ObjectivePair;

/// Sum of the strengths of every dominator; zero for non-dominated points.
pub fn raw_fitness(points: &[ObjectivePair]) -> Vec<f64> {
    let n = points.len();
    let mut strength = vec![0usize; n];
    for i in 0..n {
        for j in 0..n {
            if dominates(&points[i], &points[j]) {
                strength[i] += 1;
            }
        }
    }
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| dominates(&points[j], &points[i]))
                .map(|j| strength[j] as f64)
                .sum()
        })
        .collect()
}

fn normalized(points: &[ObjectivePair]) -> Vec<[f64; 2]> {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points {
        for m in 0..2 {
            lo[m] = lo[m].min(p.get(m));
            hi[m] = hi[m].max(p.get(m));
        }
    }
    let span = |m: usize| if hi[m] > lo[m] { hi[m] - lo[m] } else { 1.0 };
    points
        .iter()
        .map(|p| [(p.z1 - lo[0]) / span(0), (p.z2 - lo[1]) / span(1)])
        .collect()
}

fn dist(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Raw fitness plus density `1 / (d_k + 2)` with `d_k` the distance to the
/// k-th nearest neighbour in normalized objective space.
pub fn spea2_fitness(points: &[ObjectivePair], k: usize) -> Vec<f64> {
    let raw = raw_fitness(points);
    let norm = normalized(points);
    let n = points.len();
    let k = k.clamp(1, n.saturating_sub(1).max(1));
    let mut buf = Vec::with_capacity(n);
    (0..n)
        .map(|i| {
            buf.clear();
            buf.extend((0..n).filter(|&j| j != i).map(|j| dist(&norm[i], &norm[j])));
            let dk = if buf.is_empty() {
                0.0
            } else {
                let idx = (k - 1).min(buf.len() - 1);
                *buf.select_nth_unstable_by(idx, f64::total_cmp).1
            };
            raw[i] + 1.0 / (dk + 2.0)
        })
        .collect()
}

/// Indices (into `points`) kept after truncating `members` down to `size`.
/// Exact duplicates go first, largest group first; then the point closest to
/// its neighbours (lexicographic on sorted distances) is dropped repeatedly,
/// never removing the two extreme points.
fn truncate(points: &[ObjectivePair], members: Vec<usize>, size: usize) -> Vec<usize> {
    let mut alive = members;
    // Duplicate phase.
    while alive.len() > size {
        let mut groups: Vec<(ObjectivePair, Vec<usize>)> = Vec::new();
        for (pos, &i) in alive.iter().enumerate() {
            match groups.iter_mut().find(|g| g.0 == points[i]) {
                Some(g) => g.1.push(pos),
                None => groups.push((points[i], vec![pos])),
            }
        }
        let Some(largest) = groups.iter().filter(|g| g.1.len() > 1).max_by_key(|g| g.1.len()) else {
            break;
        };
        let drop = *largest.1.last().expect("group has members");
        alive.remove(drop);
    }
    if alive.len() <= size {
        return alive;
    }
    let pts: Vec<ObjectivePair> = alive.iter().map(|&i| points[i]).collect();
    let norm = normalized(&pts);
    let n = pts.len();
    let argmin = |m: usize| (0..n).min_by(|&a, &b| pts[a].get(m).total_cmp(&pts[b].get(m))).expect("non-empty");
    let protected = if size >= 2 { vec![argmin(0), argmin(1)] } else { Vec::new() };
    let mut neighbours: Vec<Vec<(f64, usize)>> = (0..n)
        .map(|i| {
            let mut v: Vec<(f64, usize)> = (0..n).filter(|&j| j != i).map(|j| (dist(&norm[i], &norm[j]), j)).collect();
            v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            v
        })
        .collect();
    let mut live = vec![true; n];
    let mut count = n;
    while count > size {
        let victim = (0..n)
            .filter(|&i| live[i] && !protected.contains(&i))
            .min_by(|&a, &b| {
                let da = neighbours[a].iter().map(|x| x.0);
                let db = neighbours[b].iter().map(|x| x.0);
                da.partial_cmp(db).expect("finite distances").then(a.cmp(&b))
            })
            .expect("an unprotected member remains");
        live[victim] = false;
        count -= 1;
        for (i, list) in neighbours.iter_mut().enumerate() {
            if live[i] {
                list.retain(|&(_, j)| j != victim);
            }
        }
    }
    (0..n).filter(|&i| live[i]).map(|i| alive[i]).collect()
}

/// Environmental selection into an archive of exactly `size` members
/// (or all of `pool` if smaller).
fn select_archive(mut pool: Vec<Individual>, size: usize, k: usize) -> Vec<Individual> {
    let objs = objectives_of(&pool);
    let fitness = spea2_fitness(&objs, k);
    for (ind, f) in pool.iter_mut().zip(&fitness) {
        ind.fitness = *f;
    }
    let nondominated: Vec<usize> = (0..pool.len()).filter(|&i| fitness[i] < 1.0).collect();
    let chosen = if nondominated.len() > size {
        truncate(&objs, nondominated, size)
    } else {
        let mut order: Vec<usize> = (0..pool.len()).collect();
        order.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]).then(a.cmp(&b)));
        order.truncate(size);
        order
    };
    let mut slots: Vec<Option<Individual>> = pool.into_iter().map(Some).collect();
    chosen.into_iter().map(|i| slots[i].take().expect("chosen once")).collect()
}

pub(crate) fn run(mut ctx: RunContext) -> RunOutcome {
    let cfg = ctx.cfg;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let len = ctx.key_count();
    let k = ((cfg.population_size + cfg.archive_size) as f64).sqrt().floor() as usize;
    let init = (0..cfg.population_size)
        .map(|_| random_chromosome(len, &mut rng))
        .collect();
    let mut pop = ctx.evaluate(init);
    let mut archive: Vec<Individual> = Vec::new();
    loop {
        let mut pool = std::mem::take(&mut archive);
        pool.append(&mut pop);
        archive = select_archive(pool, cfg.archive_size, k);
        let elite: Vec<ObjectivePair> = archive.iter().filter(|i| i.fitness < 1.0).map(|i| i.objectives).collect();
        ctx.report(&elite);
        if !ctx.proceed() {
            break;
        }
        let parents: Vec<_> = archive.iter().map(|i| i.chromosome.clone()).collect();
        let limit = ctx.remaining();
        let offspring = variation(&parents, cfg, limit, &mut rng, ChildMutation::Off, |rng: &mut ChaCha8Rng| {
            let a = rng.gen_range(0..archive.len());
            let b = rng.gen_range(0..archive.len());
            if archive[b].fitness < archive[a].fitness {
                b
            } else {
                a
            }
        });
        pop = ctx.evaluate(offspring);
        ctx.generation += 1;
    }
    let elite: Vec<Individual> = archive.into_iter().filter(|i| i.fitness < 1.0).collect();
    ctx.finish(&elite)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(z1: f64, z2: f64) -> ObjectivePair {
        ObjectivePair::new(z1, z2)
    }

    #[test]
    fn nondominated_raw_fitness_is_zero() {
        let pts = [p(1.0, 3.0), p(2.0, 2.0), p(3.0, 3.0), p(4.0, 4.0)];
        let raw = raw_fitness(&pts);
        assert_eq!(raw[0], 0.0);
        assert_eq!(raw[1], 0.0);
        // Strengths: (1,3) -> 2, (2,2) -> 2, (3,3) -> 1.
        assert_eq!(raw[2], 4.0);
        assert_eq!(raw[3], 5.0);
    }

    #[test]
    fn small_nondominated_set_fills_archive() {
        let pts = [p(1.0, 3.0), p(2.0, 2.0), p(3.0, 1.0)];
        let fit = spea2_fitness(&pts, 2);
        assert!(fit.iter().all(|&f| f < 1.0));
    }

    #[test]
    fn truncation_keeps_extremes_and_spreads() {
        let pts = [p(0.0, 10.0), p(1.0, 9.0), p(1.1, 8.9), p(5.0, 5.0), p(10.0, 0.0)];
        let kept = truncate(&pts, (0..5).collect(), 4);
        assert_eq!(kept.len(), 4);
        assert!(kept.contains(&0) && kept.contains(&4) && kept.contains(&3));
        let kept = truncate(&pts, (0..5).collect(), 2);
        assert_eq!(kept, vec![0, 4]);
    }

    #[test]
    fn duplicates_truncated_first() {
        let pts = [p(0.0, 1.0), p(0.0, 1.0), p(0.0, 1.0), p(1.0, 0.0), p(0.5, 0.5)];
        let kept = truncate(&pts, (0..5).collect(), 3);
        let objs: Vec<_> = kept.iter().map(|&i| pts[i]).collect();
        assert!(objs.contains(&p(0.0, 1.0)) && objs.contains(&p(1.0, 0.0)) && objs.contains(&p(0.5, 0.5)));
    }
}
