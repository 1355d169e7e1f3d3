//! Per-generation run log.

use serde::{Deserialize, Serialize};

use super::GenerationReport;
use crate::evaluation::ObjectivePair;
use crate::metrics::hypervolume_clipped;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLogRow {
    pub generation: usize,
    pub evaluations: u64,
    pub archive_size: usize,
    pub best_z1: f64,
    pub best_z2: f64,
    pub hypervolume: f64,
}

/// Collects one row per report. The hypervolume reference is fixed at the
/// first report: its worst values plus 10% of the range.
#[derive(Debug, Default, Clone)]
pub struct RunLog {
    reference: Option<ObjectivePair>,
    pub rows: Vec<RunLogRow>,
}

impl RunLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, report: &GenerationReport) {
        let elite = report.elite;
        let best_z1 = elite.iter().map(|p| p.z1).fold(f64::INFINITY, f64::min);
        let best_z2 = elite.iter().map(|p| p.z2).fold(f64::INFINITY, f64::min);
        if self.reference.is_none() && !elite.is_empty() {
            let worst_z1 = elite.iter().map(|p| p.z1).fold(f64::NEG_INFINITY, f64::max);
            let worst_z2 = elite.iter().map(|p| p.z2).fold(f64::NEG_INFINITY, f64::max);
            let pad = |lo: f64, hi: f64| {
                let r = hi - lo;
                if r > 0.0 {
                    0.1 * r
                } else {
                    0.1 * hi.abs().max(1.0)
                }
            };
            self.reference = Some(ObjectivePair::new(
                worst_z1 + pad(best_z1, worst_z1),
                worst_z2 + pad(best_z2, worst_z2),
            ));
        }
        let hypervolume = self.reference.map_or(0.0, |r| hypervolume_clipped(elite, r));
        self.rows.push(RunLogRow {
            generation: report.generation,
            evaluations: report.evaluations,
            archive_size: elite.len(),
            best_z1,
            best_z2,
            hypervolume,
        });
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}
