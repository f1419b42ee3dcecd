//! CSV and manifest emission. One CSV per metric with the fixed schema
//! `axis_value,scheme,path,value,ci_lo,ci_hi`; analytic rows carry the
//! bracket ends as the interval. Floats are written with `ryu`-shortest
//! formatting, so identical runs produce identical bytes.

use anyhow::{Context, Result};
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const METRICS: &[&str] = &[
    "coverage",
    "per_user_se",
    "tx_ase",
    "rx_ase",
    "tx_nee",
    "rx_nee",
    "mean_comp_size",
];

/// Accumulates rows per metric and writes one file per metric.
#[derive(Debug, Default)]
pub struct CsvSink {
    rows: Vec<(String, String)>, // (metric, formatted row)
}

impl CsvSink {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(
        &mut self,
        metric: &str,
        axis_value: f64,
        scheme: &str,
        path: &str,
        value: f64,
        ci_lo: f64,
        ci_hi: f64,
    ) {
        self.rows.push((
            metric.to_string(),
            format!("{axis_value},{scheme},{path},{value},{ci_lo},{ci_hi}"),
        ));
    }

    /// Write `<metric>.csv` files under `dir`.
    pub fn write_all(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        let mut written = Vec::new();
        for metric in METRICS {
            let rows: Vec<&String> = self
                .rows
                .iter()
                .filter(|(m, _)| m == metric)
                .map(|(_, r)| r)
                .collect();
            if rows.is_empty() {
                continue;
            }
            let path = dir.join(format!("{metric}.csv"));
            let mut f = fs::File::create(&path)
                .with_context(|| format!("creating {}", path.display()))?;
            writeln!(f, "axis_value,scheme,path,value,ci_lo,ci_hi")?;
            for r in rows {
                writeln!(f, "{r}")?;
            }
            written.push(path);
        }
        Ok(written)
    }
}

/// Run manifest: everything needed to reproduce the outputs bit-exactly.
#[derive(Debug, Serialize)]
pub struct Manifest<S: Serialize, W: Serialize> {
    pub scenario: S,
    pub sweep: Option<W>,
    pub seed: u64,
    pub code_version: &'static str,
    pub wall_time_s: f64,
    pub per_point_status: Vec<PointStatus>,
}

#[derive(Debug, Serialize)]
pub struct PointStatus {
    pub axis_value: f64,
    pub status: String,
}

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn write_manifest<S: Serialize, W: Serialize>(
    dir: &Path,
    manifest: &Manifest<S, W>,
) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(manifest)?;
    fs::write(&path, text)?;
    Ok(path)
}

/// Write a realization dump: `tier,y_m,x_m,link_class` per point.
pub fn write_realization_csv(path: &Path, real: &udn_core::geometry::BsRealization) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut f = fs::File::create(path)?;
    writeln!(f, "tier,y_m,x_m,link_class")?;
    for p in &real.points {
        let class = match p.class {
            udn_core::model::LinkClass::Los => "los",
            udn_core::model::LinkClass::Nlos => "nlos",
        };
        writeln!(f, "{},{},{},{}", p.tier, p.y, p.x, class)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_schema_and_determinism() {
        let tmp = tempfile::tempdir().unwrap();
        let mut sink = CsvSink::new();
        sink.push("coverage", 1e-4, "rrlp_n2", "mc", 0.5, 0.49, 0.51);
        sink.push("coverage", 1e-4, "rrlp_n2", "analytic", 0.505, 0.48, 0.52);
        sink.push("tx_ase", 1e-4, "rrlp_n2", "mc", 1e-4, 9e-5, 1.1e-4);
        let written = sink.write_all(tmp.path()).unwrap();
        assert_eq!(written.len(), 2);
        let text = std::fs::read_to_string(tmp.path().join("coverage.csv")).unwrap();
        assert!(text.starts_with("axis_value,scheme,path,value,ci_lo,ci_hi\n"));
        assert_eq!(text.lines().count(), 3);
        // byte determinism of float formatting
        let mut sink2 = CsvSink::new();
        sink2.push("coverage", 1e-4, "rrlp_n2", "mc", 0.5, 0.49, 0.51);
        sink2.push("coverage", 1e-4, "rrlp_n2", "analytic", 0.505, 0.48, 0.52);
        sink2.push("tx_ase", 1e-4, "rrlp_n2", "mc", 1e-4, 9e-5, 1.1e-4);
        let tmp2 = tempfile::tempdir().unwrap();
        sink2.write_all(tmp2.path()).unwrap();
        let a = std::fs::read(tmp.path().join("coverage.csv")).unwrap();
        let b = std::fs::read(tmp2.path().join("coverage.csv")).unwrap();
        assert_eq!(a, b);
    }
}
