//! Output files: records as CSV and JSON, profiles as TSV.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use lmtr_core::SolverConfig;
use serde::{Deserialize, Serialize};

use crate::{BenchError, Metric, ProfileCurve, Result, RunRecord, SuiteConfig};

pub const RECORDS_CSV: &str = "records.csv";
pub const RECORDS_JSON: &str = "records.json";

pub fn profile_file_name(metric: Metric) -> String {
    format!("profile_{metric}.tsv")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedConfig {
    pub solver_id: String,
    pub config: SolverConfig,
}

/// Records together with everything needed to rerun them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunBundle {
    pub suite: SuiteConfig,
    pub configs: Vec<NamedConfig>,
    pub records: Vec<RunRecord>,
}

impl RunBundle {
    pub fn new(suite: &SuiteConfig, records: Vec<RunRecord>) -> Self {
        let configs = suite
            .solvers
            .iter()
            .map(|s| NamedConfig {
                solver_id: s.id(),
                config: s.apply(&suite.base),
            })
            .collect();
        Self {
            suite: suite.clone(),
            configs,
            records,
        }
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| BenchError::io(path, e))
}

pub fn records_csv(records: &[RunRecord]) -> std::result::Result<String, csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn write_records_csv(records: &[RunRecord], path: &Path) -> Result<()> {
    let text = records_csv(records).map_err(|source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    write_text(path, &text)
}

pub fn read_records_csv(path: &Path) -> Result<Vec<RunRecord>> {
    let csv_err = |source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err)
}

pub fn write_bundle_json(bundle: &RunBundle, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(bundle).map_err(|source| BenchError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_bundle_json(path: &Path) -> Result<RunBundle> {
    let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| BenchError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Records from a run directory, preferring the JSON bundle.
pub fn read_run_dir(dir: &Path) -> Result<Vec<RunRecord>> {
    let json = dir.join(RECORDS_JSON);
    if json.exists() {
        Ok(read_bundle_json(&json)?.records)
    } else {
        read_records_csv(&dir.join(RECORDS_CSV))
    }
}

/// One row per τ: `tau`, then `ρ(τ)` for each solver in curve order.
pub fn profile_tsv(curves: &[ProfileCurve]) -> String {
    let mut out = String::from("tau");
    for c in curves {
        out.push('\t');
        out.push_str(&c.solver_id);
    }
    out.push('\n');
    let rows = curves.first().map_or(0, |c| c.points.len());
    for i in 0..rows {
        write!(out, "{}", curves[0].points[i].0).unwrap();
        for c in curves {
            write!(out, "\t{}", c.points[i].1).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn profile_json(curves: &[ProfileCurve]) -> String {
    let mut text = serde_json::to_string_pretty(curves).expect("curves are finite");
    text.push('\n');
    text
}
