use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{format_sig6, sort_cells, AggregateStats, CellResult};
use crate::{Error, Result};

pub const CELLS_HEADER: &str = "system,lambda,seed,episode,throughput,prevented_unsafe,eb_blocks,aix,violations";
pub const AGGREGATE_HEADER: &str = "system,lambda,metric,mean,std,n";

pub fn write_cells_csv(cells: &[CellResult]) -> String {
    let mut sorted = cells.to_vec();
    sort_cells(&mut sorted);
    let mut out = format!("{CELLS_HEADER}\n");
    for c in &sorted {
        let m = &c.metrics;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            c.system,
            format_sig6(c.lambda),
            c.seed,
            c.episode,
            m.throughput,
            m.prevented_unsafe,
            m.eb_blocks,
            format_sig6(m.aix),
            m.violations
        );
    }
    out
}

pub fn write_aggregate_csv(stats: &[AggregateStats]) -> String {
    let mut out = format!("{AGGREGATE_HEADER}\n");
    for s in stats {
        for m in &s.metrics {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                s.system,
                format_sig6(s.lambda),
                m.name,
                format_sig6(m.mean),
                format_sig6(m.std),
                s.n
            );
        }
    }
    out
}

/// Writes `cells.csv` and `aggregate.csv` into `dir`, creating it if needed.
pub fn emit_csv(stats: &[AggregateStats], cells: &[CellResult], dir: &Path) -> Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let cells_path = dir.join("cells.csv");
    let agg_path = dir.join("aggregate.csv");
    fs::write(&cells_path, write_cells_csv(cells)).map_err(|e| Error::io(&cells_path, e))?;
    fs::write(&agg_path, write_aggregate_csv(stats)).map_err(|e| Error::io(&agg_path, e))?;
    Ok((cells_path, agg_path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::System;
    use crate::metrics::{aggregate, EpisodeMetrics};

    #[test]
    fn empty_input_writes_headers_only() {
        assert_eq!(write_cells_csv(&[]), format!("{CELLS_HEADER}\n"));
        assert_eq!(write_aggregate_csv(&[]), format!("{AGGREGATE_HEADER}\n"));
    }

    #[test]
    fn one_cell() {
        let cell = CellResult {
            system: System::Proactive,
            lambda: 0.7,
            seed: 11,
            episode: 2,
            metrics: EpisodeMetrics {
                throughput: 1001,
                prevented_unsafe: 950,
                eb_blocks: 998,
                aix: 0.001,
                violations: 0,
                n_decisions: 1000,
                unmodified: 1,
            },
        };
        let cells = write_cells_csv(std::slice::from_ref(&cell));
        assert_eq!(cells.lines().nth(1).unwrap(), "proactive,0.7,11,2,1001,950,998,0.001,0");
        assert_eq!(cells.lines().count(), 2);
        let agg = write_aggregate_csv(&aggregate(&[cell]));
        let rows: Vec<_> = agg.lines().skip(1).collect();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[0], "proactive,0.7,throughput,1001,0,1");
        assert_eq!(rows[3], "proactive,0.7,aix,0.001,0,1");
    }

    #[test]
    fn io_errors_carry_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let err = emit_csv(&[], &[], &blocker.join("sub")).unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
    }
}
