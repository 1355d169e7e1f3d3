//! Three-level Taguchi tuning: orthogonal arrays, normalized goal-programming
//! response and signal-to-noise level selection.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evaluation::ObjectivePair;
use crate::instance::Instance;
use crate::metrics::{diversification_metric, mean_ideal_distance, quality_metric, spacing_metric, IdealReference};
use crate::moea::{run_with, Algorithm, AlgorithmConfig, MoeaError};

#[derive(Debug, Error)]
pub enum DoeError {
    #[error("{0} factors do not fit an L9 (up to 4) or L27 (up to 7) array")]
    FactorCount(usize),
    #[error("signal-to-noise ratio needs at least one value")]
    EmptyResponses,
    #[error("signal-to-noise ratio is infinite for these responses")]
    DegenerateResponses,
    #[error("{rows} S/N values for {expected} design rows")]
    RowMismatch { rows: usize, expected: usize },
    #[error("factor {0:?} is not tunable for {1}")]
    Factor(Param, Algorithm),
    #[error("no instances to tune on")]
    NoInstances,
    #[error(transparent)]
    Moea(#[from] MoeaError),
    #[error("invalid level grid: {0}")]
    Grid(String),
}

/// An orthogonal array with three levels (0, 1, 2) per column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalArray {
    pub rows: Vec<Vec<usize>>,
}

impl OrthogonalArray {
    /// Columns are linear forms over GF(3) in the base digits of the row index.
    fn from_forms(base: usize, forms: &[&[usize]]) -> Self {
        let runs = 3usize.pow(base as u32);
        let rows = (0..runs)
            .map(|r| {
                let digits: Vec<usize> = (0..base).map(|d| (r / 3usize.pow((base - 1 - d) as u32)) % 3).collect();
                forms
                    .iter()
                    .map(|coef| coef.iter().zip(&digits).map(|(c, d)| c * d).sum::<usize>() % 3)
                    .collect()
            })
            .collect();
        OrthogonalArray { rows }
    }

    /// Nine runs, four columns.
    pub fn l9() -> Self {
        Self::from_forms(2, &[&[1, 0], &[0, 1], &[1, 1], &[1, 2]])
    }

    /// Twenty-seven runs, seven columns.
    pub fn l27() -> Self {
        Self::from_forms(
            3,
            &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 0], &[1, 2, 0], &[0, 0, 1], &[1, 0, 1], &[1, 0, 2]],
        )
    }

    pub fn columns(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Smallest array with at least `factors` columns, truncated to them.
    pub fn for_factors(factors: usize) -> Result<Self, DoeError> {
        let full = match factors {
            1..=4 => Self::l9(),
            5..=7 => Self::l27(),
            _ => return Err(DoeError::FactorCount(factors)),
        };
        Ok(OrthogonalArray {
            rows: full.rows.into_iter().map(|r| r[..factors].to_vec()).collect(),
        })
    }

    /// Every pair of columns shows each level pair equally often.
    pub fn is_orthogonal(&self) -> bool {
        let n = self.rows.len();
        if n % 9 != 0 {
            return false;
        }
        let cols = self.columns();
        for a in 0..cols {
            for b in a + 1..cols {
                let mut counts = [[0usize; 3]; 3];
                for row in &self.rows {
                    counts[row[a]][row[b]] += 1;
                }
                if counts.iter().flatten().any(|&c| c != n / 9) {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

/// Min-max normalization to `[0, 1]` where 1 is best. Missing values and
/// constant columns map to 0.
pub fn normalize(column: &[Option<f64>], direction: Direction) -> Vec<f64> {
    let present = column.iter().flatten();
    let lo = present.clone().copied().fold(f64::INFINITY, f64::min);
    let hi = present.copied().fold(f64::NEG_INFINITY, f64::max);
    column
        .iter()
        .map(|v| match v {
            Some(r) if hi > lo => match direction {
                Direction::Maximize => (r - lo) / (hi - lo),
                Direction::Minimize => (hi - r) / (hi - lo),
            },
            _ => 0.0,
        })
        .collect()
}

/// Raw or normalized metric values of one experiment.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricValues {
    pub qm: f64,
    pub sm: f64,
    pub mid: f64,
    pub dm: f64,
}

pub const WEIGHT_QM: f64 = 100.0;
pub const WEIGHT_MID: f64 = 10.0;
pub const WEIGHT_SM: f64 = 1.0;
pub const WEIGHT_DM: f64 = 1.0;

/// Weighted goal-programming response of a normalized row.
pub fn response(normalized: &MetricValues) -> f64 {
    WEIGHT_QM * normalized.qm + WEIGHT_MID * normalized.mid + WEIGHT_SM * normalized.sm + WEIGHT_DM * normalized.dm
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnrForm {
    /// `-10 log10(mean y^2)`.
    #[default]
    SmallerIsBetter,
    /// `-10 log10(mean 1/y^2)`.
    LargerIsBetter,
}

impl std::str::FromStr for SnrForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "smaller-is-better" | "smaller" => Ok(SnrForm::SmallerIsBetter),
            "larger-is-better" | "larger" => Ok(SnrForm::LargerIsBetter),
            _ => Err(format!("unknown S/N form {s:?}")),
        }
    }
}

/// Signal-to-noise ratio in decibels.
pub fn snr(values: &[f64], form: SnrForm) -> Result<f64, DoeError> {
    if values.is_empty() {
        return Err(DoeError::EmptyResponses);
    }
    let n = values.len() as f64;
    let mean = match form {
        SnrForm::SmallerIsBetter => values.iter().map(|y| y * y).sum::<f64>() / n,
        SnrForm::LargerIsBetter => values.iter().map(|y| 1.0 / (y * y)).sum::<f64>() / n,
    };
    let db = -10.0 * mean.log10();
    if db.is_finite() {
        Ok(db)
    } else {
        Err(DoeError::DegenerateResponses)
    }
}

/// Per column, the level with the largest mean S/N; ties go to the lower level.
pub fn best_levels(design: &OrthogonalArray, snrs: &[f64]) -> Result<Vec<usize>, DoeError> {
    if snrs.len() != design.rows.len() {
        return Err(DoeError::RowMismatch {
            rows: snrs.len(),
            expected: design.rows.len(),
        });
    }
    Ok((0..design.columns())
        .map(|c| {
            let mut sum = [0.0; 3];
            let mut count = [0usize; 3];
            for (row, s) in design.rows.iter().zip(snrs) {
                sum[row[c]] += s;
                count[row[c]] += 1;
            }
            let mut best = 0;
            let mean = |l: usize| if count[l] == 0 { f64::NEG_INFINITY } else { sum[l] / count[l] as f64 };
            for l in 1..3 {
                if mean(l) > mean(best) {
                    best = l;
                }
            }
            best
        })
        .collect())
}

/// A tunable configuration field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    PopulationSize,
    ArchiveSize,
    CrossoverFraction,
    MutationFraction,
    MutationRate,
    SelectionPressure,
    DeletionPressure,
}

impl Param {
    fn apply(self, cfg: &mut AlgorithmConfig, value: f64) {
        let count = value.round().max(0.0) as usize;
        match self {
            Param::PopulationSize => cfg.population_size = count,
            Param::ArchiveSize => cfg.archive_size = count,
            Param::CrossoverFraction => cfg.crossover_fraction = value,
            Param::MutationFraction => cfg.mutation_fraction = value,
            Param::MutationRate => cfg.mutation_rate = value,
            Param::SelectionPressure => cfg.selection_pressure = count,
            Param::DeletionPressure => cfg.deletion_pressure = count,
        }
    }

    fn applies_to(self, algorithm: Algorithm) -> bool {
        match self {
            Param::ArchiveSize => matches!(algorithm, Algorithm::Spea2 | Algorithm::Pesa2),
            Param::SelectionPressure | Param::DeletionPressure => algorithm == Algorithm::Pesa2,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub name: Param,
    /// Low, medium and high.
    pub levels: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelGrid {
    pub algorithm: Algorithm,
    pub factors: Vec<Factor>,
}

impl LevelGrid {
    /// The published three-level grids.
    pub fn standard(algorithm: Algorithm) -> Self {
        let f = |name, levels| Factor { name, levels };
        let mut factors = vec![f(Param::PopulationSize, [50.0, 100.0, 150.0])];
        if matches!(algorithm, Algorithm::Spea2 | Algorithm::Pesa2) {
            factors.push(f(Param::ArchiveSize, [100.0, 200.0, 300.0]));
        }
        factors.extend([
            f(Param::CrossoverFraction, [0.7, 0.8, 0.9]),
            f(Param::MutationFraction, [0.3, 0.2, 0.1]),
            f(Param::MutationRate, [0.03, 0.05, 0.07]),
        ]);
        if algorithm == Algorithm::Pesa2 {
            factors.push(f(Param::SelectionPressure, [2.0, 3.0, 4.0]));
            factors.push(f(Param::DeletionPressure, [1.0, 2.0, 3.0]));
        }
        LevelGrid { algorithm, factors }
    }

    pub fn validate(&self) -> Result<(), DoeError> {
        OrthogonalArray::for_factors(self.factors.len())?;
        for (i, f) in self.factors.iter().enumerate() {
            if !f.name.applies_to(self.algorithm) {
                return Err(DoeError::Factor(f.name, self.algorithm));
            }
            if self.factors[..i].iter().any(|g| g.name == f.name) {
                return Err(DoeError::Grid(format!("factor {:?} listed twice", f.name)));
            }
            if f.levels.iter().any(|l| !l.is_finite()) {
                return Err(DoeError::Grid(format!("non-finite level for {:?}", f.name)));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, DoeError> {
        let grid: LevelGrid = serde_json::from_str(text).map_err(|e| DoeError::Grid(e.to_string()))?;
        grid.validate()?;
        Ok(grid)
    }

    /// Configuration with the given level index of every factor applied.
    pub fn configure(&self, base: &AlgorithmConfig, levels: &[usize]) -> AlgorithmConfig {
        let mut cfg = base.clone();
        for (f, &l) in self.factors.iter().zip(levels) {
            f.name.apply(&mut cfg, f.levels[l]);
        }
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuneOptions {
    /// Runs per experiment and instance.
    pub repetitions: usize,
    pub fe_budget: u64,
    pub seed: u64,
    pub snr_form: SnrForm,
}

impl Default for TuneOptions {
    fn default() -> Self {
        TuneOptions {
            repetitions: 3,
            fe_budget: crate::moea::DEFAULT_FE_BUDGET,
            seed: 0,
            snr_form: SnrForm::SmallerIsBetter,
        }
    }
}

/// One experiment of the design with its averaged metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub experiment: usize,
    pub levels: Vec<usize>,
    /// Mean raw metrics over all runs; missing values are skipped.
    pub raw: MetricValues,
    pub response: f64,
    pub snr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningReport {
    pub grid: LevelGrid,
    pub rows: Vec<ExperimentRow>,
    pub chosen_levels: Vec<usize>,
    pub config: AlgorithmConfig,
}

impl TuningReport {
    /// CSV with one row per experiment.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["experiment".to_string()];
        header.extend(self.grid.factors.iter().map(|f| {
            serde_json::to_value(f.name)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default()
        }));
        header.extend(["QM", "SM", "MID", "DM", "response", "snr"].map(String::from));
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec = vec![(row.experiment + 1).to_string()];
            rec.extend(
                self.grid
                    .factors
                    .iter()
                    .zip(&row.levels)
                    .map(|(f, &l)| f.levels[l].to_string()),
            );
            rec.extend(
                [row.raw.qm, row.raw.sm, row.raw.mid, row.raw.dm, row.response, row.snr].map(|v| v.to_string()),
            );
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn mix(seed: u64, parts: &[u64]) -> u64 {
    // SplitMix64 finalizer over the folded parts.
    let mut z = parts.iter().fold(seed, |acc, &p| acc.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(p).wrapping_add(1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> f64 {
    let (sum, n) = values.flatten().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

/// Runs every experiment of the design and picks the best level per factor.
///
/// Each (instance, repetition) block compares the fronts of all experiments:
/// QM is each experiment's share of the block's merged archive, MID uses the
/// block's merged extremes, and every metric column is normalized within the
/// block before the response is formed. An experiment's S/N is taken over its
/// responses in all blocks.
pub fn tune(grid: &LevelGrid, instances: &[Instance], opts: &TuneOptions) -> Result<TuningReport, DoeError> {
    grid.validate()?;
    if instances.is_empty() {
        return Err(DoeError::NoInstances);
    }
    let design = OrthogonalArray::for_factors(grid.factors.len())?;
    let base = AlgorithmConfig::defaults(grid.algorithm).with_budget(opts.fe_budget);
    let configs: Vec<AlgorithmConfig> = design.rows.iter().map(|lv| grid.configure(&base, lv)).collect();
    for cfg in &configs {
        cfg.validate()?;
    }
    let reps = opts.repetitions.max(1);
    let blocks: Vec<(usize, usize)> = (0..instances.len()).flat_map(|i| (0..reps).map(move |r| (i, r))).collect();
    let jobs: Vec<(usize, usize, usize)> = blocks
        .iter()
        .flat_map(|&(i, r)| (0..configs.len()).map(move |e| (i, r, e)))
        .collect();
    let fronts: Vec<Vec<ObjectivePair>> = jobs
        .par_iter()
        .map(|&(i, r, e)| {
            let cfg = configs[e].clone().with_seed(mix(opts.seed, &[i as u64, r as u64, e as u64]));
            let evaluator = crate::evaluation::Evaluator::new(
                &instances[i],
                crate::decoder::DecodeOptions::for_instance(&instances[i]),
                crate::evaluation::DEFAULT_PENALTY_RATE,
            );
            run_with(&evaluator, &cfg, None, &mut |_| {}).map(|out| out.front.points)
        })
        .collect::<Result<_, _>>()?;

    let n_exp = configs.len();
    let mut raw: Vec<Vec<[Option<f64>; 4]>> = vec![Vec::new(); n_exp];
    let mut responses: Vec<Vec<f64>> = vec![Vec::new(); n_exp];
    for (b, _) in blocks.iter().enumerate() {
        let block = &fronts[b * n_exp..(b + 1) * n_exp];
        let refs: Vec<&[ObjectivePair]> = block.iter().map(Vec::as_slice).collect();
        let qm = quality_metric(&refs).ok();
        let ideal = IdealReference::from_points(block.iter().flatten());
        let rows: Vec<[Option<f64>; 4]> = block
            .iter()
            .enumerate()
            .map(|(e, f)| {
                let mid = ideal.as_ref().and_then(|r| mean_ideal_distance(f, r).ok());
                let dm = (!f.is_empty()).then(|| diversification_metric(f));
                [qm.as_ref().map(|q| q[e]), spacing_metric(f), mid, dm]
            })
            .collect();
        let column = |j: usize| rows.iter().map(|r| r[j]).collect::<Vec<_>>();
        let nq = normalize(&column(0), Direction::Maximize);
        let ns = normalize(&column(1), Direction::Minimize);
        let nm = normalize(&column(2), Direction::Minimize);
        let nd = normalize(&column(3), Direction::Maximize);
        for e in 0..n_exp {
            let norm = MetricValues {
                qm: nq[e],
                sm: ns[e],
                mid: nm[e],
                dm: nd[e],
            };
            responses[e].push(response(&norm));
            raw[e].push(rows[e]);
        }
    }

    let rows: Vec<ExperimentRow> = (0..n_exp)
        .map(|e| {
            let col = |j: usize| mean_of(raw[e].iter().map(|r| r[j]));
            let ys = &responses[e];
            // A zero mean square is the ideal of the smaller-is-better form; a zero
            // response is the worst of the larger-is-better form.
            let s = snr(ys, opts.snr_form).unwrap_or(match opts.snr_form {
                SnrForm::SmallerIsBetter => f64::INFINITY,
                SnrForm::LargerIsBetter => f64::NEG_INFINITY,
            });
            ExperimentRow {
                experiment: e,
                levels: design.rows[e].clone(),
                raw: MetricValues {
                    qm: col(0),
                    sm: col(1),
                    mid: col(2),
                    dm: col(3),
                },
                response: ys.iter().sum::<f64>() / ys.len() as f64,
                snr: s,
            }
        })
        .collect();
    let snrs: Vec<f64> = rows.iter().map(|r| r.snr).collect();
    let chosen = best_levels(&design, &snrs)?;
    let mut config = grid.configure(&base, &chosen);
    config.seed = opts.seed;
    Ok(TuningReport {
        grid: grid.clone(),
        rows,
        chosen_levels: chosen,
        config,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrays_are_orthogonal() {
        for (arr, runs, cols) in [(OrthogonalArray::l9(), 9, 4), (OrthogonalArray::l27(), 27, 7)] {
            assert_eq!(arr.rows.len(), runs);
            assert_eq!(arr.columns(), cols);
            assert!(arr.is_orthogonal());
        }
        assert!(matches!(OrthogonalArray::for_factors(8), Err(DoeError::FactorCount(8))));
        assert!(matches!(OrthogonalArray::for_factors(0), Err(DoeError::FactorCount(0))));
        assert_eq!(OrthogonalArray::for_factors(5).unwrap().rows.len(), 27);
        let mut broken = OrthogonalArray::l9();
        broken.rows[0][1] = (broken.rows[0][1] + 1) % 3;
        assert!(!broken.is_orthogonal());
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(normalize(&[Some(2.0), Some(4.0)], Direction::Maximize), vec![0.0, 1.0]);
        assert_eq!(normalize(&[Some(2.0), Some(4.0)], Direction::Minimize), vec![1.0, 0.0]);
        assert_eq!(normalize(&[Some(5.0); 3], Direction::Maximize), vec![0.0; 3]);
        assert_eq!(normalize(&[Some(1.0), None, Some(3.0)], Direction::Minimize), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn response_examples() {
        let all = |v| MetricValues { qm: v, sm: v, mid: v, dm: v };
        assert_eq!(response(&all(1.0)), 112.0);
        assert_eq!(response(&all(0.0)), 0.0);
        let r = response(&MetricValues {
            qm: 0.5,
            mid: 0.2,
            sm: 0.4,
            dm: 0.6,
        });
        assert!((r - 53.0).abs() < 1e-12);
    }

    #[test]
    fn snr_examples() {
        assert!(snr(&[1.0, 1.0, 1.0], SnrForm::SmallerIsBetter).unwrap().abs() < 1e-12);
        assert!((snr(&[10.0], SnrForm::SmallerIsBetter).unwrap() + 20.0).abs() < 1e-12);
        assert!((snr(&[3.0, 4.0], SnrForm::SmallerIsBetter).unwrap() + 10.969_100_130_080_564).abs() < 1e-9);
        assert!((snr(&[10.0], SnrForm::LargerIsBetter).unwrap() - 20.0).abs() < 1e-12);
        assert!(matches!(snr(&[0.0], SnrForm::SmallerIsBetter), Err(DoeError::DegenerateResponses)));
        assert!(matches!(snr(&[0.0], SnrForm::LargerIsBetter), Err(DoeError::DegenerateResponses)));
        assert!(matches!(snr(&[], SnrForm::SmallerIsBetter), Err(DoeError::EmptyResponses)));
    }

    #[test]
    fn best_level_rules() {
        let l9 = OrthogonalArray::l9();
        assert_eq!(best_levels(&l9, &[0.0; 9]).unwrap(), vec![0; 4]);
        let snrs: Vec<f64> = l9.rows.iter().map(|r| if r[0] == 2 { 5.0 } else { 1.0 }).collect();
        assert_eq!(best_levels(&l9, &snrs).unwrap()[0], 2);
        assert!(best_levels(&l9, &[0.0; 3]).is_err());
    }

    #[test]
    fn standard_grids_pick_the_array() {
        assert_eq!(LevelGrid::standard(Algorithm::Nsga2).factors.len(), 4);
        assert_eq!(LevelGrid::standard(Algorithm::Nrga).factors.len(), 4);
        assert_eq!(LevelGrid::standard(Algorithm::Spea2).factors.len(), 5);
        assert_eq!(LevelGrid::standard(Algorithm::Pesa2).factors.len(), 7);
        for alg in Algorithm::ALL {
            let g = LevelGrid::standard(alg);
            g.validate().unwrap();
            let back = LevelGrid::from_json(&serde_json::to_string(&g).unwrap()).unwrap();
            assert_eq!(back, g);
        }
        let mut bad = LevelGrid::standard(Algorithm::Nsga2);
        bad.factors.push(Factor {
            name: Param::SelectionPressure,
            levels: [1.0, 2.0, 3.0],
        });
        assert!(matches!(bad.validate(), Err(DoeError::Factor(Param::SelectionPressure, Algorithm::Nsga2))));
    }
}
