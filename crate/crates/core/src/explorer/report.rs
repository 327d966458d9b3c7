//! Report serialization: full-fidelity JSON plus a flat CSV summary, both
//! with deterministic field order so identical runs produce identical bytes.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::gray_wyner::MembershipVerdict;

use super::{SweepRecord, SweepReport};

/// Paths produced by [`write_report`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportFiles {
    pub json: PathBuf,
    pub csv: PathBuf,
}

/// Writes `report.json` and `report.csv` under `dir`, creating it if needed.
pub fn write_report(report: &SweepReport, dir: &Path) -> Result<ReportFiles> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let json = dir.join("report.json");
    let csv = dir.join("report.csv");
    write_json(report, &json)?;
    write_csv(report, &csv)?;
    Ok(ReportFiles { json, csv })
}

/// Full-fidelity JSON, pretty-printed with a trailing newline.
pub fn write_json(report: &SweepReport, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads back a JSON report.
pub fn read_json(path: &Path) -> Result<SweepReport> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Flat one-row-per-record CSV. The private-rate columns are sized by the
/// sweep's k, a fixed width within any one report.
pub fn write_csv(report: &SweepReport, path: &Path) -> Result<()> {
    let n = 1usize << report.config.k;
    let io_err = |source: csv::Error| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    let mut header = vec![
        "index".to_string(),
        "source_id".into(),
        "strategy_id".into(),
        "regime".into(),
        "eta".into(),
        "k".into(),
        "source_correlated".into(),
        "h_x".into(),
        "h_source".into(),
        "sum_mi".into(),
        "sum_residual".into(),
        "eq1_violated".into(),
        "eq2_violated".into(),
        "r0".into(),
    ];
    for i in 1..=n {
        header.push(format!("r{i}"));
    }
    header.extend(["verdict".into(), "gap_or_bound".into(), "flagged".into()]);
    w.write_record(&header).map_err(io_err)?;
    for r in &report.records {
        w.write_record(csv_row(r, n)).map_err(io_err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_row(r: &SweepRecord, n: usize) -> Vec<String> {
    let gap_or_bound = match &r.verdict {
        MembershipVerdict::Inside { .. } => String::new(),
        MembershipVerdict::Outside { certified_bound, .. } => format!("{certified_bound}"),
        MembershipVerdict::Undetermined { gap } => format!("{gap}"),
    };
    let mut row = vec![
        r.index.to_string(),
        r.source_id.clone(),
        r.strategy_id.clone(),
        r.regime.label().to_string(),
        r.eta.map(|e| e.to_string()).unwrap_or_default(),
        r.k.to_string(),
        r.source_correlated.to_string(),
        r.evaluation.h_x.to_string(),
        r.evaluation.h_source.to_string(),
        r.evaluation.eq1_rhs.to_string(),
        r.evaluation
            .residual_per_index
            .iter()
            .sum::<f64>()
            .to_string(),
        r.eq1_violated.to_string(),
        r.eq2_violated.to_string(),
        r.rate_point.r0().to_string(),
    ];
    for i in 0..n {
        row.push(r.rate_point.rs()[i].to_string());
    }
    row.extend([
        r.verdict.label().to_string(),
        gap_or_bound,
        r.flagged.to_string(),
    ]);
    row
}
