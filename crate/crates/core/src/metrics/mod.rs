//! Per-slot records, per-episode metrics, cross-seed aggregation and CSV.

mod csv;
mod format;

use serde::{Deserialize, Serialize};

pub use self::csv::{emit_csv, write_aggregate_csv, write_cells_csv, AGGREGATE_HEADER, CELLS_HEADER};
pub use format::format_sig6;

use crate::harness::System;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotRecord {
    pub slot_index: usize,
    pub proposal_size: usize,
    /// The proposal was unsafe and was corrected before execution.
    pub was_unsafe_proposal: bool,
    pub eb_blocked: bool,
    pub executed_size: usize,
    /// Executed set equals the proposal exactly.
    pub unmodified: bool,
    pub served: u32,
    pub violation: bool,
    pub beta_after: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMetrics {
    pub throughput: u64,
    pub prevented_unsafe: u64,
    pub eb_blocks: u64,
    /// Autonomy index: fraction of slots executed exactly as proposed.
    pub aix: f64,
    pub violations: u64,
    pub n_decisions: u64,
    pub unmodified: u64,
}

pub const METRIC_NAMES: [&str; 5] = ["throughput", "prevented_unsafe", "eb_blocks", "aix", "violations"];

impl EpisodeMetrics {
    pub fn metric(&self, name: &str) -> Option<f64> {
        Some(match name {
            "throughput" => self.throughput as f64,
            "prevented_unsafe" => self.prevented_unsafe as f64,
            "eb_blocks" => self.eb_blocks as f64,
            "aix" => self.aix,
            "violations" => self.violations as f64,
            _ => return None,
        })
    }
}

pub fn finalize_episode(records: &[SlotRecord]) -> Result<EpisodeMetrics> {
    if records.is_empty() {
        return Err(Error::Empty("slot records"));
    }
    let count = |f: fn(&SlotRecord) -> bool| records.iter().filter(|r| f(r)).count() as u64;
    let n = records.len() as u64;
    let unmodified = count(|r| r.unmodified);
    Ok(EpisodeMetrics {
        throughput: records.iter().map(|r| r.served as u64).sum(),
        prevented_unsafe: count(|r| r.was_unsafe_proposal),
        eb_blocks: count(|r| r.eb_blocked),
        aix: unmodified as f64 / n as f64,
        violations: count(|r| r.violation),
        n_decisions: n,
        unmodified,
    })
}

/// One evaluation episode of one experiment cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub system: System,
    pub lambda: f64,
    pub seed: u64,
    pub episode: usize,
    pub metrics: EpisodeMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricStat {
    pub name: &'static str,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator; 0 for a single cell).
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateStats {
    pub system: System,
    pub lambda: f64,
    pub n: usize,
    pub metrics: Vec<MetricStat>,
}

impl AggregateStats {
    pub fn get(&self, name: &str) -> Option<&MetricStat> {
        self.metrics.iter().find(|m| m.name == name)
    }

    pub fn mean(&self, name: &str) -> f64 {
        self.get(name).map_or(f64::NAN, |m| m.mean)
    }
}

pub fn sort_cells(cells: &mut [CellResult]) {
    cells.sort_by(|a, b| {
        a.system
            .cmp(&b.system)
            .then(a.lambda.total_cmp(&b.lambda))
            .then(a.seed.cmp(&b.seed))
            .then(a.episode.cmp(&b.episode))
    });
}

/// Mean and sample standard deviation of every metric per (system, lambda).
pub fn aggregate(cells: &[CellResult]) -> Vec<AggregateStats> {
    let mut sorted = cells.to_vec();
    sort_cells(&mut sorted);
    let same_group = |a: &CellResult, b: &CellResult| a.system == b.system && a.lambda.to_bits() == b.lambda.to_bits();
    sorted
        .chunk_by(same_group)
        .map(|group| {
            let metrics = METRIC_NAMES
                .iter()
                .map(|&name| {
                    let xs: Vec<f64> = group.iter().filter_map(|c| c.metrics.metric(name)).collect();
                    summarize(name, &xs)
                })
                .collect();
            AggregateStats { system: group[0].system, lambda: group[0].lambda, n: group.len(), metrics }
        })
        .collect()
}

fn summarize(name: &'static str, xs: &[f64]) -> MetricStat {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // Summation error can nudge a constant group's mean outside [min, max].
    MetricStat { name, mean: mean.clamp(min, max), std, min, max }
}
