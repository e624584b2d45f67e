//! Artifact writers: run manifests, CSV tables and JSON summaries.
//!
//! CSV is comma-delimited UTF-8 with LF line endings and a header row.
//! Floats are written with Rust's shortest round-trip formatting, so a
//! rerun of the same manifest is byte-identical.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::args::ResolvedCommon;
use crate::CliResult;

pub const SCHEMA_VERSION: u32 = 1;

/// The record that fully determines a run.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    /// Self-contained flag list reproducing this run byte-identically.
    pub canonical_argv: Vec<String>,
    /// The argv actually given (config file references and all).
    pub invoked_argv: Vec<String>,
    pub resolved: serde_json::Value,
    pub outputs: Vec<String>,
    pub master_seed: u64,
    pub tool_version: String,
    pub wall_clock_ms: u128,
}

/// Sink for one command's artifacts.
pub struct Artifacts {
    common: ResolvedCommon,
    start: std::time::Instant,
    written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn new(common: &ResolvedCommon) -> CliResult<Self> {
        std::fs::create_dir_all(&common.out_dir)?;
        Ok(Self { common: common.clone(), start: std::time::Instant::now(), written: vec![] })
    }

    fn path(&self, suffix: &str) -> PathBuf {
        self.common.out_dir.join(format!("{}{suffix}", self.common.prefix))
    }

    pub fn csv_path(&self) -> PathBuf {
        self.path(".csv")
    }

    pub fn write_csv(&mut self, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
        let path = self.csv_path();
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push('\n');
        for row in rows {
            buf.push_str(&row.join(","));
            buf.push('\n');
        }
        write_atomically(&path, buf.as_bytes())?;
        self.written.push(path);
        Ok(())
    }

    pub fn write_summary<S: Serialize>(&mut self, summary: &S) -> CliResult<()> {
        let path = self.path("_summary.json");
        let mut body = serde_json::to_vec_pretty(summary).expect("serializable summary");
        body.push(b'\n');
        write_atomically(&path, &body)?;
        self.written.push(path);
        Ok(())
    }

    /// Write the manifest last so it can list every artifact.
    pub fn write_manifest(
        mut self,
        command: &str,
        canonical_argv: Vec<String>,
        invoked_argv: &[String],
        resolved: serde_json::Value,
    ) -> CliResult<()> {
        let manifest = RunManifest {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            canonical_argv,
            invoked_argv: invoked_argv.to_vec(),
            resolved,
            outputs: self
                .written
                .iter()
                .map(|p| p.to_string_lossy().into_owned())
                .collect(),
            master_seed: self.common.seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_ms: self.start.elapsed().as_millis(),
        };
        let path = self.path("_manifest.json");
        let mut body = serde_json::to_vec_pretty(&manifest).expect("serializable manifest");
        body.push(b'\n');
        write_atomically(&path, &body)?;
        self.written.push(path);
        Ok(())
    }
}

fn write_atomically(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)
}

/// Shortest round-trip float formatting shared by every CSV.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Format an optional cell; absent oracle columns are empty.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}
