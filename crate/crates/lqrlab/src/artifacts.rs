//! Output directory bookkeeping, cross-seed aggregation and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use lqrlab_opt::DescentTrace;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::HarnessError;

/// Files written under one run directory, in write order.
#[derive(Debug)]
pub struct ArtifactDir {
    root: PathBuf,
    written: Vec<String>,
}

impl ArtifactDir {
    pub fn create(root: &Path) -> Result<Self, HarnessError> {
        fs::create_dir_all(root)?;
        Ok(Self { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    /// Writes `rel` (which may contain subdirectories) through `f`.
    pub fn write_with<F>(&mut self, rel: &str, f: F) -> Result<(), HarnessError>
    where
        F: FnOnce(&mut dyn Write) -> Result<(), HarnessError>,
    {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let mut file = std::io::BufWriter::new(fs::File::create(&path)?);
        f(&mut file)?;
        file.flush()?;
        self.written.push(rel.to_string());
        Ok(())
    }

    pub fn write_table(&mut self, rel: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), HarnessError> {
        self.write_with(rel, |out| {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(header)?;
            for r in rows {
                w.write_record(r)?;
            }
            w.flush()?;
            Ok(())
        })
    }

    pub fn write_trace(&mut self, rel: &str, trace: &DescentTrace) -> Result<(), HarnessError> {
        self.write_with(rel, |out| Ok(trace.write_csv(out)?))
    }
}

pub fn fmt(v: f64) -> String {
    v.to_string()
}

/// Median of the non-NaN values; NaN if none.
pub fn median(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values.iter().filter(|x| !x.is_nan()).fold((f64::NAN, f64::NAN), |(lo, hi), &x| {
        (if lo.is_nan() { x } else { lo.min(x) }, if hi.is_nan() { x } else { hi.max(x) })
    })
}

/// Per-iteration median and min/max envelope across seeds. A trace that
/// stopped early contributes its last record to later iterations.
pub fn aggregate_rows(traces: &[DescentTrace]) -> Vec<Vec<String>> {
    let len = traces.iter().map(|t| t.records.len()).max().unwrap_or(0);
    (0..len)
        .map(|i| {
            fn at(t: &DescentTrace, i: usize) -> &lqrlab_opt::TraceRecord {
                &t.records[i.min(t.records.len() - 1)]
            }
            let errs: Vec<f64> =
                traces.iter().filter(|t| !t.records.is_empty()).map(|t| at(t, i).normalized_error).collect();
            let costs: Vec<f64> = traces.iter().filter(|t| !t.records.is_empty()).map(|t| at(t, i).cost).collect();
            let (elo, ehi) = min_max(&errs);
            let (clo, chi) = min_max(&costs);
            vec![i.to_string(), fmt(median(&errs)), fmt(elo), fmt(ehi), fmt(median(&costs)), fmt(clo), fmt(chi)]
        })
        .collect()
}

pub const AGGREGATE_HEADER: [&str; 7] = [
    "iter",
    "median_normalized_error",
    "min_normalized_error",
    "max_normalized_error",
    "median_cost",
    "min_cost",
    "max_cost",
];

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorInfo {
    pub module: String,
    pub name: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub kind: String,
    pub config_sha256: String,
    pub seeds: Vec<u64>,
    pub versions: BTreeMap<String, String>,
    pub status: String,
    pub exit_code: i32,
    pub error: Option<ErrorInfo>,
    pub artifacts: Vec<String>,
    pub results: BTreeMap<String, serde_json::Value>,
}

pub fn versions() -> BTreeMap<String, String> {
    let v = env!("CARGO_PKG_VERSION").to_string();
    ["lqrlab", "lqrlab-core", "lqrlab-opt", "lqrlab-zo", "lqrlab-liquidation", "lqrlab-baselines"]
        .iter()
        .map(|name| (name.to_string(), v.clone()))
        .collect()
}

pub fn write_manifest(root: &Path, manifest: &Manifest) -> Result<(), HarnessError> {
    fs::create_dir_all(root)?;
    let mut text = serde_json::to_string_pretty(manifest).map_err(|e| HarnessError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(root.join("manifest.json"), text)?;
    Ok(())
}
