//! Kruskal-Wallis omnibus test and Dunn pairwise comparisons with Bonferroni
//! adjustment.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_ur;
use thiserror::Error;

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("need at least two groups, got {0}")]
    TooFewGroups(usize),
    #[error("group {0:?} is empty")]
    EmptyGroup(String),
    #[error("need at least three observations in total, got {0}")]
    TooFewObservations(usize),
    #[error("group {0:?} contains a non-finite value")]
    NonFinite(String),
}

/// Named samples, one per algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGroups {
    groups: Vec<(String, Vec<f64>)>,
}

impl SampleGroups {
    pub fn new(groups: Vec<(String, Vec<f64>)>) -> Result<Self, StatsError> {
        if groups.len() < 2 {
            return Err(StatsError::TooFewGroups(groups.len()));
        }
        for (name, values) in &groups {
            if values.is_empty() {
                return Err(StatsError::EmptyGroup(name.clone()));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(StatsError::NonFinite(name.clone()));
            }
        }
        let total: usize = groups.iter().map(|g| g.1.len()).sum();
        if total < 3 {
            return Err(StatsError::TooFewObservations(total));
        }
        Ok(SampleGroups { groups })
    }

    /// Unnamed groups labelled `g1`, `g2`, ...
    pub fn from_values(groups: Vec<Vec<f64>>) -> Result<Self, StatsError> {
        Self::new(groups.into_iter().enumerate().map(|(i, g)| (format!("g{}", i + 1), g)).collect())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.groups.iter().map(|g| g.0.as_str())
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    fn total(&self) -> usize {
        self.groups.iter().map(|g| g.1.len()).sum()
    }
}

/// Mid-ranks of the pooled sample (1-based) and the tie term sum(t^3 - t).
fn pooled_ranks(groups: &SampleGroups) -> (Vec<Vec<f64>>, f64) {
    let mut pooled: Vec<(f64, usize, usize)> = groups
        .groups
        .iter()
        .enumerate()
        .flat_map(|(g, (_, v))| v.iter().enumerate().map(move |(i, &x)| (x, g, i)))
        .collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut ranks: Vec<Vec<f64>> = groups.groups.iter().map(|g| vec![0.0; g.1.len()]).collect();
    let mut ties = 0.0;
    let mut start = 0;
    while start < pooled.len() {
        let mut end = start + 1;
        while end < pooled.len() && pooled[end].0 == pooled[start].0 {
            end += 1;
        }
        let mid = (start + end + 1) as f64 / 2.0;
        for &(_, g, i) in &pooled[start..end] {
            ranks[g][i] = mid;
        }
        let t = (end - start) as f64;
        ties += t * t * t - t;
        start = end;
    }
    (ranks, ties)
}

/// Upper tail of the chi-square distribution.
pub fn chi_square_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_ur(df / 2.0, x / 2.0)
}

/// Two-sided standard normal tail probability.
pub fn normal_two_sided(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KruskalWallis {
    pub h: f64,
    pub df: usize,
    pub p_value: f64,
}

pub fn kruskal_wallis(groups: &SampleGroups) -> KruskalWallis {
    let n = groups.total() as f64;
    let (ranks, ties) = pooled_ranks(groups);
    let sum: f64 = ranks
        .iter()
        .map(|r| {
            let s: f64 = r.iter().sum();
            s * s / r.len() as f64
        })
        .sum();
    let raw = 12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0);
    let factor = 1.0 - ties / (n * n * n - n);
    let df = groups.len() - 1;
    if factor <= 0.0 {
        return KruskalWallis {
            h: 0.0,
            df,
            p_value: 1.0,
        };
    }
    let h = (raw / factor).max(0.0);
    KruskalWallis {
        h,
        df,
        p_value: chi_square_sf(h, df as f64),
    }
}

/// One pairwise comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DunnRow {
    pub first: String,
    pub second: String,
    /// Difference of mean ranks, first minus second.
    pub statistic: f64,
    pub std_error: f64,
    pub z: f64,
    pub p_value: f64,
    pub adjusted_p: f64,
    pub significant: bool,
}

/// Bonferroni adjustment over `m` comparisons.
pub fn bonferroni(p: f64, m: usize) -> f64 {
    (p * m as f64).min(1.0)
}

pub fn pairwise_dunn(groups: &SampleGroups, alpha: f64) -> Vec<DunnRow> {
    let n = groups.total() as f64;
    let (ranks, ties) = pooled_ranks(groups);
    let means: Vec<f64> = ranks.iter().map(|r| r.iter().sum::<f64>() / r.len() as f64).collect();
    let k = groups.len();
    let m = k * (k - 1) / 2;
    let spread = n * (n + 1.0) / 12.0 - ties / (12.0 * (n - 1.0));
    let mut out = Vec::with_capacity(m);
    for i in 0..k {
        for j in i + 1..k {
            let (ni, nj) = (ranks[i].len() as f64, ranks[j].len() as f64);
            let statistic = means[i] - means[j];
            let std_error = (spread.max(0.0) * (1.0 / ni + 1.0 / nj)).sqrt();
            let z = if std_error > 0.0 { statistic / std_error } else { 0.0 };
            let p_value = normal_two_sided(z);
            let adjusted_p = bonferroni(p_value, m);
            out.push(DunnRow {
                first: groups.groups[i].0.clone(),
                second: groups.groups[j].0.clone(),
                statistic,
                std_error,
                z,
                p_value,
                adjusted_p,
                significant: adjusted_p < alpha,
            });
        }
    }
    out
}

/// CSV with the columns of a pairwise comparison table.
pub fn write_dunn_csv<W: std::io::Write>(metric: &str, rows: &[DunnRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "metric",
        "sample1-sample2",
        "test_statistic",
        "std_error",
        "std_test_statistic",
        "sig",
        "adj_sig",
        "significant",
    ])?;
    for r in rows {
        w.write_record([
            metric.to_string(),
            format!("{}-{}", r.first, r.second),
            r.statistic.to_string(),
            r.std_error.to_string(),
            r.z.to_string(),
            r.p_value.to_string(),
            r.adjusted_p.to_string(),
            r.significant.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
