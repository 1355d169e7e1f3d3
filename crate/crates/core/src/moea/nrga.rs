//! Ranked roulette wheel parent selection.

use rand::Rng;

use super::{Individual, MoeaError};

/// Selection probability of the member holding `rank` (1-based, `n` = fittest).
pub fn rbrw_probability(rank: usize, n: usize) -> Result<f64, MoeaError> {
    if rank == 0 || rank > n {
        return Err(MoeaError::Rank { rank, n });
    }
    Ok(2.0 * rank as f64 / (n as f64 * (n as f64 + 1.0)))
}

/// Cumulative wheel over a population ordered by (front, crowding).
#[derive(Debug, Clone)]
pub struct RbrwWheel {
    /// Population indices, fittest first.
    order: Vec<usize>,
    cumulative: Vec<f64>,
}

impl RbrwWheel {
    pub fn new(pop: &[Individual]) -> Self {
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&a, &b| {
            pop[a]
                .rank
                .cmp(&pop[b].rank)
                .then(pop[b].crowding.total_cmp(&pop[a].crowding))
                .then(a.cmp(&b))
        });
        let n = pop.len();
        let mut acc = 0.0;
        let cumulative = (0..n)
            .map(|pos| {
                acc += rbrw_probability(n - pos, n).expect("rank within 1..=n");
                acc
            })
            .collect();
        RbrwWheel { order, cumulative }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty population");
        let u = rng.gen::<f64>() * total;
        let pos = self.cumulative.partition_point(|&c| c <= u).min(self.order.len() - 1);
        self.order[pos]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probability_examples() {
        assert_eq!(rbrw_probability(3, 3).unwrap(), 0.5);
        assert_eq!(rbrw_probability(1, 1).unwrap(), 1.0);
        let total: f64 = (1..=10).map(|r| rbrw_probability(r, 10).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(rbrw_probability(0, 3), Err(MoeaError::Rank { rank: 0, n: 3 }));
        assert_eq!(rbrw_probability(4, 3), Err(MoeaError::Rank { rank: 4, n: 3 }));
    }
}
