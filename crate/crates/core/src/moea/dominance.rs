//! Pareto dominance, fast non-dominated sorting and crowding distance.

use crate::evaluation::ObjectivePair;

/// `a` is no worse in both objectives and differs in at least one.
pub fn dominates(a: &ObjectivePair, b: &ObjectivePair) -> bool {
    a.z1 <= b.z1 && a.z2 <= b.z2 && (a.z1 < b.z1 || a.z2 < b.z2)
}

/// Partitions indices into successive non-dominated fronts.
pub fn non_dominated_sort(points: &[ObjectivePair]) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominated_sets: Vec<Vec<usize>> = vec![Vec::new(); n];
    for p in 0..n {
        for q in p + 1..n {
            if dominates(&points[p], &points[q]) {
                dominated_sets[p].push(q);
                dominated_by_count[q] += 1;
            } else if dominates(&points[q], &points[p]) {
                dominated_sets[q].push(p);
                dominated_by_count[p] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominated_sets[p] {
                dominated_by_count[q] -= 1;
                if dominated_by_count[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Front rank (0-based) of every point.
pub fn front_ranks(fronts: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut rank = vec![0; n];
    for (r, front) in fronts.iter().enumerate() {
        for &i in front {
            rank[i] = r;
        }
    }
    rank
}

/// Crowding distance of each member of `front` (indices into `points`),
/// returned in the order of `front`.
pub fn crowding_distance(points: &[ObjectivePair], front: &[usize]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    for m in 0..2 {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            points[front[a]]
                .get(m)
                .total_cmp(&points[front[b]].get(m))
                .then(a.cmp(&b))
        });
        let lo = points[front[order[0]]].get(m);
        let hi = points[front[order[n - 1]]].get(m);
        dist[order[0]] = f64::INFINITY;
        dist[order[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for w in 1..n - 1 {
            let gap = points[front[order[w + 1]]].get(m) - points[front[order[w - 1]]].get(m);
            dist[order[w]] += gap / range;
        }
    }
    dist
}

/// Indices of the non-dominated points, keeping one representative per
/// objective pair (the first occurrence).
pub fn non_dominated_indices(points: &[ObjectivePair]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .z1
            .total_cmp(&points[b].z1)
            .then(points[a].z2.total_cmp(&points[b].z2))
            .then(a.cmp(&b))
    });
    let mut keep = Vec::new();
    let mut best_z2 = f64::INFINITY;
    let mut last: Option<ObjectivePair> = None;
    for i in order {
        let p = points[i];
        if last.is_some_and(|l| l.z1 == p.z1 && l.z2 == p.z2) {
            continue;
        }
        if p.z2 < best_z2 {
            keep.push(i);
            best_z2 = p.z2;
            last = Some(p);
        }
    }
    keep.sort_unstable();
    keep
}

/// Non-dominated, duplicate-free subset sorted by `z1`.
pub fn pareto_filter(points: &[ObjectivePair]) -> Vec<ObjectivePair> {
    let mut out: Vec<ObjectivePair> = non_dominated_indices(points).into_iter().map(|i| points[i]).collect();
    out.sort_by(|a, b| a.z1.total_cmp(&b.z1));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(z1: f64, z2: f64) -> ObjectivePair {
        ObjectivePair::new(z1, z2)
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&p(1.0, 1.0), &p(2.0, 2.0)));
        assert!(!dominates(&p(1.0, 2.0), &p(2.0, 1.0)));
        assert!(!dominates(&p(2.0, 1.0), &p(1.0, 2.0)));
        assert!(!dominates(&p(1.0, 1.0), &p(1.0, 1.0)));
    }

    #[test]
    fn sort_examples() {
        assert_eq!(non_dominated_sort(&[p(1.0, 1.0), p(2.0, 2.0)]), vec![vec![0], vec![1]]);
        assert_eq!(non_dominated_sort(&[p(1.0, 2.0), p(2.0, 1.0)]), vec![vec![0, 1]]);
    }

    #[test]
    fn crowding_examples() {
        let pts = [p(0.0, 2.0), p(1.0, 1.0), p(2.0, 0.0)];
        let d = crowding_distance(&pts, &[0, 1, 2]);
        assert!(d[0].is_infinite() && d[2].is_infinite());
        assert!((d[1] - 2.0).abs() < 1e-12);
        assert!(crowding_distance(&pts, &[0, 2]).iter().all(|d| d.is_infinite()));
        let shuffled = crowding_distance(&pts, &[2, 0, 1]);
        assert_eq!(shuffled[2], d[1]);
    }

    #[test]
    fn filter_drops_duplicates_and_dominated() {
        let pts = [p(1.0, 3.0), p(2.0, 2.0), p(1.0, 3.0), p(3.0, 3.0)];
        assert_eq!(pareto_filter(&pts), vec![p(1.0, 3.0), p(2.0, 2.0)]);
        assert_eq!(non_dominated_indices(&pts), vec![0, 1]);
    }
}
