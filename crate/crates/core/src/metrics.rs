//! Front comparison metrics: quality share, spacing, mean ideal distance,
//! diversification and two-objective hypervolume.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evaluation::ObjectivePair;
use crate::front::near;
use crate::moea::dominance::dominates;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("no points to compare")]
    EmptyUnion,
    #[error("quality metric needs at least two fronts")]
    TooFewFronts,
    #[error("objective {0} has zero range")]
    ZeroRange(usize),
    #[error("point {0} does not dominate the reference point")]
    BeyondReference(usize),
    #[error("invalid metrics CSV: {0}")]
    Csv(String),
}

/// Share of the merged non-dominated archive contributed by each front.
/// A point produced by several fronts is credited to each of them.
pub fn quality_metric(fronts: &[&[ObjectivePair]]) -> Result<Vec<f64>, MetricError> {
    if fronts.len() < 2 {
        return Err(MetricError::TooFewFronts);
    }
    let union: Vec<ObjectivePair> = fronts.iter().flat_map(|f| f.iter().copied()).collect();
    if union.is_empty() {
        return Err(MetricError::EmptyUnion);
    }
    let survives = |p: &ObjectivePair| !union.iter().any(|q| dominates(q, p));
    // Distinct surviving points form the archive.
    let mut archive: Vec<ObjectivePair> = Vec::new();
    for p in union.iter().filter(|p| survives(p)) {
        if !archive.iter().any(|a| near(a, p)) {
            archive.push(*p);
        }
    }
    let size = archive.len() as f64;
    Ok(fronts
        .iter()
        .map(|f| {
            let owned = archive.iter().filter(|a| f.iter().any(|p| near(a, p))).count();
            owned as f64 / size
        })
        .collect())
}

/// Spacing of consecutive points sorted by `z1`; `None` below three points.
pub fn spacing_metric(front: &[ObjectivePair]) -> Option<f64> {
    if front.len() < 3 {
        return None;
    }
    let mut pts = front.to_vec();
    pts.sort_by(|a, b| a.z1.total_cmp(&b.z1).then(a.z2.total_cmp(&b.z2)));
    let gaps: Vec<f64> = pts
        .windows(2)
        .map(|w| ((w[1].z1 - w[0].z1).powi(2) + (w[1].z2 - w[0].z2).powi(2)).sqrt())
        .collect();
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    if mean == 0.0 {
        return Some(0.0);
    }
    let dev: f64 = gaps.iter().map(|d| (mean - d).abs()).sum();
    Some(dev / ((pts.len() - 1) as f64 * mean))
}

/// Per-objective best value and range used to normalize MID.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealReference {
    pub best: ObjectivePair,
    pub min: ObjectivePair,
    pub max: ObjectivePair,
}

impl IdealReference {
    /// Best and extremes over all given points (typically the merged archive
    /// of every front compared in one experiment).
    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a ObjectivePair>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        let (mut min, mut max) = (first, first);
        for p in it {
            min.z1 = min.z1.min(p.z1);
            min.z2 = min.z2.min(p.z2);
            max.z1 = max.z1.max(p.z1);
            max.z2 = max.z2.max(p.z2);
        }
        Some(IdealReference { best: min, min, max })
    }
}

pub fn mean_ideal_distance(front: &[ObjectivePair], reference: &IdealReference) -> Result<f64, MetricError> {
    let r1 = reference.max.z1 - reference.min.z1;
    let r2 = reference.max.z2 - reference.min.z2;
    if r1 <= 0.0 {
        return Err(MetricError::ZeroRange(0));
    }
    if r2 <= 0.0 {
        return Err(MetricError::ZeroRange(1));
    }
    if front.is_empty() {
        return Err(MetricError::EmptyUnion);
    }
    let total: f64 = front
        .iter()
        .map(|p| {
            let a = (p.z1 - reference.best.z1) / r1;
            let b = (p.z2 - reference.best.z2) / r2;
            (a * a + b * b).sqrt()
        })
        .sum();
    Ok(total / front.len() as f64)
}

/// Euclidean norm of the per-objective ranges.
pub fn diversification_metric(front: &[ObjectivePair]) -> f64 {
    let Some(r) = IdealReference::from_points(front) else {
        return 0.0;
    };
    ((r.max.z1 - r.min.z1).powi(2) + (r.max.z2 - r.min.z2).powi(2)).sqrt()
}

/// Exact area dominated by `front` and bounded by `reference`.
pub fn hypervolume(front: &[ObjectivePair], reference: ObjectivePair) -> Result<f64, MetricError> {
    if let Some(i) = front
        .iter()
        .position(|p| !(p.z1 < reference.z1 && p.z2 < reference.z2))
    {
        return Err(MetricError::BeyondReference(i));
    }
    Ok(hypervolume_clipped(front, reference))
}

/// Hypervolume ignoring points that do not dominate the reference.
pub fn hypervolume_clipped(front: &[ObjectivePair], reference: ObjectivePair) -> f64 {
    let mut pts: Vec<ObjectivePair> = front
        .iter()
        .copied()
        .filter(|p| p.z1 < reference.z1 && p.z2 < reference.z2)
        .collect();
    pts.sort_by(|a, b| a.z1.total_cmp(&b.z1).then(a.z2.total_cmp(&b.z2)));
    let mut area = 0.0;
    let mut prev_z2 = reference.z2;
    for p in &pts {
        if p.z2 < prev_z2 {
            area += (reference.z1 - p.z1) * (prev_z2 - p.z2);
            prev_z2 = p.z2;
        }
    }
    area
}

/// One row of the metrics table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub test: String,
    pub run: u64,
    pub algorithm: String,
    #[serde(rename = "QM")]
    pub qm: f64,
    #[serde(rename = "SM")]
    pub sm: Option<f64>,
    #[serde(rename = "MID")]
    pub mid: Option<f64>,
    #[serde(rename = "DM")]
    pub dm: f64,
}

pub fn write_metrics_csv<W: std::io::Write>(rows: &[MetricsRow], out: W) -> Result<(), MetricError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| MetricError::Csv(e.to_string()))?;
    }
    w.flush().map_err(|e| MetricError::Csv(e.to_string()))
}

pub fn read_metrics_csv<R: std::io::Read>(input: R) -> Result<Vec<MetricsRow>, MetricError> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize()
        .map(|row| row.map_err(|e| MetricError::Csv(e.to_string())))
        .collect()
}

/// Metrics of several fronts for the same test and run. QM is each front's
/// share of their merged archive (1 for a lone non-empty front), MID is
/// measured against the merged extremes, and SM or MID are left empty where
/// undefined.
pub fn compare_fronts(test: &str, run: u64, fronts: &[(&str, &[ObjectivePair])]) -> Vec<MetricsRow> {
    let refs: Vec<&[ObjectivePair]> = fronts.iter().map(|f| f.1).collect();
    let qm = match refs.as_slice() {
        [only] => vec![if only.is_empty() { 0.0 } else { 1.0 }],
        _ => quality_metric(&refs).unwrap_or_else(|_| vec![0.0; refs.len()]),
    };
    let ideal = IdealReference::from_points(refs.iter().flat_map(|f| f.iter()));
    fronts
        .iter()
        .zip(qm)
        .map(|(&(algorithm, front), qm)| MetricsRow {
            test: test.to_string(),
            run,
            algorithm: algorithm.to_string(),
            qm,
            sm: spacing_metric(front),
            mid: ideal.as_ref().and_then(|r| mean_ideal_distance(front, r).ok()),
            dm: diversification_metric(front),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(z1: f64, z2: f64) -> ObjectivePair {
        ObjectivePair::new(z1, z2)
    }

    #[test]
    fn quality_examples() {
        let a = [p(1.0, 3.0)];
        let b = [p(2.0, 2.0)];
        let c = [p(3.0, 3.0)];
        assert_eq!(quality_metric(&[&a, &b, &c]).unwrap(), vec![0.5, 0.5, 0.0]);
        let f = [p(1.0, 2.0), p(2.0, 1.0)];
        assert_eq!(quality_metric(&[&f, &f, &f, &f]).unwrap(), vec![1.0; 4]);
        assert_eq!(quality_metric(&[&a]), Err(MetricError::TooFewFronts));
        assert_eq!(quality_metric(&[&[], &[]]), Err(MetricError::EmptyUnion));
    }

    #[test]
    fn spacing_examples() {
        assert_eq!(spacing_metric(&[p(0.0, 2.0), p(1.0, 1.0), p(2.0, 0.0)]), Some(0.0));
        // Gaps (1, 3): mean 2, deviations 1 + 1, over (3 - 1) * 2.
        let sm = spacing_metric(&[p(0.0, 0.0), p(1.0, 0.0), p(4.0, 0.0)]).unwrap();
        assert!((sm - 0.5).abs() < 1e-12);
        assert_eq!(spacing_metric(&[p(0.0, 1.0), p(1.0, 0.0)]), None);
    }

    #[test]
    fn mid_examples() {
        let reference = IdealReference {
            best: p(0.0, 0.0),
            min: p(0.0, 0.0),
            max: p(10.0, 10.0),
        };
        assert_eq!(mean_ideal_distance(&[p(0.0, 0.0)], &reference).unwrap(), 0.0);
        assert!((mean_ideal_distance(&[p(6.0, 8.0)], &reference).unwrap() - 1.0).abs() < 1e-12);
        assert!((mean_ideal_distance(&[p(6.0, 8.0), p(0.0, 0.0)], &reference).unwrap() - 0.5).abs() < 1e-12);
        let flat = IdealReference {
            max: p(10.0, 0.0),
            ..reference
        };
        assert_eq!(mean_ideal_distance(&[p(1.0, 0.0)], &flat), Err(MetricError::ZeroRange(1)));
    }

    #[test]
    fn dm_examples() {
        assert_eq!(diversification_metric(&[p(1.0, 1.0)]), 0.0);
        assert_eq!(diversification_metric(&[p(0.0, 4.0), p(3.0, 0.0)]), 5.0);
    }

    #[test]
    fn hv_examples() {
        assert_eq!(hypervolume(&[p(1.0, 1.0)], p(2.0, 2.0)).unwrap(), 1.0);
        assert_eq!(hypervolume(&[p(1.0, 2.0), p(2.0, 1.0)], p(3.0, 3.0)).unwrap(), 3.0);
        assert_eq!(hypervolume(&[p(3.0, 1.0)], p(3.0, 3.0)), Err(MetricError::BeyondReference(0)));
    }

    #[test]
    fn comparison_rows() {
        let a = [p(0.0, 4.0), p(1.0, 2.0), p(4.0, 0.0)];
        let b = [p(0.0, 4.0), p(2.0, 2.0)];
        let rows = compare_fronts("t", 2, &[("A", &a), ("B", &b)]);
        assert_eq!(rows.len(), 2);
        assert_eq!((rows[0].qm, rows[1].qm), (1.0, 1.0 / 3.0));
        assert_eq!(rows[1].sm, None);
        assert_eq!(rows[0].dm, diversification_metric(&a));
        assert_eq!(compare_fronts("t", 1, &[("A", &a)])[0].qm, 1.0);
        let same = compare_fronts("t", 1, &[("A", &a), ("B", &a)]);
        assert!(same.iter().all(|r| r.qm == 1.0));
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            MetricsRow {
                test: "t1".into(),
                run: 1,
                algorithm: "NSGA2".into(),
                qm: 0.5,
                sm: None,
                mid: Some(0.25),
                dm: 3.0,
            },
            MetricsRow {
                test: "t1".into(),
                run: 1,
                algorithm: "PESA2".into(),
                qm: 0.5,
                sm: Some(0.1),
                mid: Some(0.5),
                dm: 4.0,
            },
        ];
        let mut buf = Vec::new();
        write_metrics_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("test,run,algorithm,QM,SM,MID,DM\n"));
        assert!(text.contains("NSGA2,0.5,,0.25"));
        assert_eq!(read_metrics_csv(buf.as_slice()).unwrap(), rows);
    }
}
