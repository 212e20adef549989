//! Run directories, manifests and artifact writing.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Provenance of one invocation. Artifacts embed it without the timing so
/// that identical runs produce identical files; `manifest.json` carries the
/// wall-clock duration as well.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub config: Value,
    pub seed: u64,
    pub threads: usize,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

pub struct Run {
    pub dir: PathBuf,
    pub manifest: RunManifest,
    started: Instant,
}

impl Run {
    /// Creates `<out>/<UTC timestamp>-seed<seed>`, adding a numeric suffix if
    /// that directory already exists.
    pub fn create(out: &Path, manifest: RunManifest) -> Result<Self> {
        let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ");
        let base = format!("{stamp}-seed{}", manifest.seed);
        fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
        let mut dir = out.join(&base);
        let mut n = 1;
        while dir.exists() {
            dir = out.join(format!("{base}-{n}"));
            n += 1;
        }
        fs::create_dir(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
        Ok(Run { dir, manifest, started: Instant::now() })
    }

    /// Writes `{"manifest": …, key: payload}` as pretty JSON.
    pub fn write_json<T: Serialize>(&self, name: &str, key: &str, payload: &T) -> Result<PathBuf> {
        let mut doc = serde_json::Map::new();
        doc.insert("manifest".into(), serde_json::to_value(&self.manifest)?);
        doc.insert(key.into(), serde_json::to_value(payload)?);
        self.write_text(name, &(serde_json::to_string_pretty(&Value::Object(doc))? + "\n"))
    }

    /// Writes CSV text behind a `# manifest: {…}` comment line.
    pub fn write_csv(&self, name: &str, body: &str) -> Result<PathBuf> {
        let header = format!("# manifest: {}\n", serde_json::to_string(&self.manifest)?);
        self.write_text(name, &(header + body))
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }

    pub fn finish(self) -> Result<PathBuf> {
        let mut manifest = self.manifest.clone();
        manifest.wall_clock_seconds = Some(self.started.elapsed().as_secs_f64());
        self.write_text("manifest.json", &(serde_json::to_string_pretty(&manifest)? + "\n"))?;
        Ok(self.dir)
    }
}
