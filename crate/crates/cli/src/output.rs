//! Artifact writing: CSV bodies with '#' provenance comments (byte-stable
//! across reruns) and JSON sidecars carrying the full resolved configuration
//! plus a timestamp.

use anyhow::Context;
use lfpp_core::report::{Table, FORMAT_TAG};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub struct OutputWriter {
    dir: PathBuf,
    subcommand: String,
    seed: u64,
    params: Vec<(String, String)>,
    threads: usize,
}

impl OutputWriter {
    pub fn new(
        dir: &Path,
        subcommand: &str,
        seed: u64,
        params: Vec<(String, String)>,
        threads: usize,
    ) -> anyhow::Result<Self> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(OutputWriter {
            dir: dir.to_path_buf(),
            subcommand: subcommand.to_string(),
            seed,
            params,
            threads,
        })
    }

    fn comments(&self) -> Vec<String> {
        let mut c = vec![
            format!("format={FORMAT_TAG}"),
            format!("subcommand={}", self.subcommand),
            format!("seed={}", self.seed),
        ];
        for (k, v) in &self.params {
            c.push(format!("{k}={v}"));
        }
        c
    }

    /// Writes `<subcommand>.csv`; the body is deterministic given the table.
    pub fn write_csv(&self, table: &Table) -> anyhow::Result<PathBuf> {
        let path = self.dir.join(format!("{}.csv", self.subcommand));
        std::fs::write(&path, table.to_csv(&self.comments()))
            .with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }

    /// Writes a raw deterministic text artifact under the subcommand name.
    pub fn write_text(&self, extension: &str, body: &str) -> anyhow::Result<PathBuf> {
        let path = self.dir.join(format!("{}.{extension}", self.subcommand));
        std::fs::write(&path, body).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }

    /// Writes `<subcommand>.json` with provenance and a summary payload.
    pub fn write_json(&self, summary: serde_json::Value) -> anyhow::Result<PathBuf> {
        let path = self.dir.join(format!("{}.json", self.subcommand));
        let config: serde_json::Map<String, serde_json::Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        let doc = json!({
            "format": FORMAT_TAG,
            "version": env!("CARGO_PKG_VERSION"),
            "subcommand": self.subcommand,
            "seed": self.seed,
            "config": config,
            "threads": self.threads,
            "generated_unix": SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            "summary": summary,
        });
        std::fs::write(&path, serde_json::to_string_pretty(&doc)?)
            .with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }
}
