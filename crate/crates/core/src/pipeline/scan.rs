use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use log::warn;
use rayon::prelude::*;
use serde::Serialize;

use super::config::RunConfig;
use super::train::load_inputs;
use crate::data_io::{min_max_scale, partition, Dataset};
use crate::error::Result;
use crate::noise_filter::{filter_partition, gini_impurity, scan_to_csv, GiniScanPoint};
use crate::seeds::{self, Stream};

/// One grid point averaged over partitions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregatePoint {
    pub p: f64,
    pub gini_clean: f64,
    pub gini_noisy: f64,
    /// Ratio of the two means (infinite when the mean noisy impurity is 0).
    pub ratio: f64,
    /// Impurity of the whole training set; the same on every row.
    pub gini_full: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionScan {
    pub partition_id: usize,
    pub best_p: f64,
    pub scan: Vec<GiniScanPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    pub partitions: Vec<PartitionScan>,
    pub aggregate: Vec<AggregatePoint>,
    /// Most frequent per-partition best p; ties go to the larger p.
    pub modal_best_p: f64,
    pub gini_full: f64,
}

impl ScanSummary {
    pub fn aggregate_point(&self, p: f64) -> Option<&AggregatePoint> {
        self.aggregate.iter().find(|a| (a.p - p).abs() < 1e-9)
    }

    /// Human-readable summary. The chosen p is printed under both readings
    /// of "percentage": fraction retained and fraction removed.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for ps in &self.partitions {
            let _ = writeln!(out, "partition {:>3}: best retained fraction {}", ps.partition_id, ps.best_p);
        }
        let p = self.modal_best_p;
        let _ = writeln!(out, "modal best p: {p}");
        let _ = writeln!(out, "full-data gini: {:.6}", self.gini_full);
        let show = |out: &mut String, label: &str, q: f64| match self.aggregate_point(q) {
            Some(a) => {
                let _ = writeln!(
                    out,
                    "  {label}: retained {q} -> mean gini clean {:.6}, noisy {:.6}",
                    a.gini_clean, a.gini_noisy
                );
            }
            None => {
                let _ = writeln!(out, "  {label}: retained {q} is not on the grid");
            }
        };
        show(&mut out, "as retained fraction", p);
        show(&mut out, "as removed fraction ", ((1.0 - p) * 1e12).round() / 1e12);
        out
    }
}

/// Scans every partition of an in-memory dataset.
pub fn gini_scan_dataset(data: &Dataset, cfg: &RunConfig) -> Result<ScanSummary> {
    cfg.validate()?;
    let scaled = if cfg.scaling {
        min_max_scale(data).0
    } else {
        data.clone()
    };
    let fc = cfg.filter_config(scaled.dim())?;
    let parts = partition(&scaled, cfg.partitions, seeds::sub_seed(cfg.seed, Stream::Partition, 0))?;
    let parts: Vec<_> = parts
        .into_iter()
        .filter(|p| {
            if p.len() < 2 {
                warn!("partition {} has {} instance(s); not scanned", p.id, p.len());
            }
            p.len() >= 2
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs.unwrap_or(0))
        .build()
        .map_err(|e| crate::Error::InvalidArgument(format!("cannot start worker pool: {e}")))?;
    let partitions: Vec<PartitionScan> = pool.install(|| {
        parts
            .par_iter()
            .map(|p| {
                filter_partition(p, &scaled, &fc)
                    .map(|r| PartitionScan {
                        partition_id: p.id,
                        best_p: r.chosen_p,
                        scan: r.scan,
                    })
                    .map_err(|e| e.in_partition(p.id))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let gini_full = gini_impurity(data.labels())?;
    let m = partitions.len().max(1) as f64;
    let aggregate = fc
        .grid
        .iter()
        .enumerate()
        .map(|(g, &p)| {
            let clean = partitions.iter().map(|s| s.scan[g].gini_clean).sum::<f64>() / m;
            let noisy = partitions.iter().map(|s| s.scan[g].gini_noisy).sum::<f64>() / m;
            AggregatePoint {
                p,
                gini_clean: clean,
                gini_noisy: noisy,
                ratio: if noisy > 0.0 { clean / noisy } else { f64::INFINITY },
                gini_full,
            }
        })
        .collect();

    Ok(ScanSummary {
        modal_best_p: modal(&partitions, &fc.grid),
        partitions,
        aggregate,
        gini_full,
    })
}

fn modal(partitions: &[PartitionScan], grid: &[f64]) -> f64 {
    let mut best = (0usize, grid.last().copied().unwrap_or(1.0));
    for &p in grid {
        let count = partitions.iter().filter(|s| s.best_p == p).count();
        if count >= best.0 {
            best = (count, p);
        }
    }
    best.1
}

pub fn aggregate_to_csv(points: &[AggregatePoint]) -> String {
    let mut out = String::from("p,gini_clean,gini_noisy,ratio,gini_full\n");
    for a in points {
        let ratio = if a.ratio.is_finite() {
            a.ratio.to_string()
        } else {
            "inf".to_string()
        };
        let _ = writeln!(out, "{},{},{},{},{}", a.p, a.gini_clean, a.gini_noisy, ratio, a.gini_full);
    }
    out
}

/// Reads the training file, scans it and writes `scan_partition_NNN.csv`
/// plus `scan_aggregate.csv` into the output directory.
pub fn gini_scan(cfg: &RunConfig) -> Result<ScanSummary> {
    cfg.validate()?;
    let (train, _) = load_inputs(&RunConfig {
        test_path: None,
        ..cfg.clone()
    })?;
    let summary = gini_scan_dataset(&train, cfg)?;
    write_scan(&cfg.output_dir, &summary)?;
    Ok(summary)
}

fn write_scan(dir: &Path, summary: &ScanSummary) -> Result<()> {
    fs::create_dir_all(dir)?;
    for ps in &summary.partitions {
        fs::write(dir.join(format!("scan_partition_{:03}.csv", ps.partition_id)), scan_to_csv(&ps.scan))?;
    }
    fs::write(dir.join("scan_aggregate.csv"), aggregate_to_csv(&summary.aggregate))?;
    Ok(())
}
