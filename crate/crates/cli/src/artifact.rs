//! Output artifacts and the run manifest.
//!
//! Every artifact is written to a temporary file in the output directory and
//! renamed into place. Text artifacts start with a `#` provenance line
//! naming the tool version, seed and config digest; JSON artifacts carry the
//! same fields under `"provenance"`. Nothing time-dependent goes into an
//! artifact, only into the manifest.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

pub const TOOL: &str = "cxrlabel";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of a file's contents.
pub fn file_digest(path: &Path) -> std::io::Result<String> {
    let mut file = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Write `path` via a temporary sibling and a rename.
pub fn write_atomic(
    path: &Path,
    fill: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        fill(&mut w)?;
        w.flush().map_err(io)?;
    }
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct InputRecord {
    path: PathBuf,
    sha256: String,
}

/// One subcommand run: collects input digests, writes artifacts and
/// finally the manifest.
pub struct Run {
    subcommand: &'static str,
    seed: u64,
    config_digest: String,
    config: RunConfig,
    out_dir: PathBuf,
    started_unix_ms: u128,
    started: Instant,
    inputs: BTreeMap<&'static str, InputRecord>,
    outputs: BTreeMap<String, String>,
    timings_ms: BTreeMap<String, f64>,
    stage_start: Instant,
}

impl Run {
    pub fn start(subcommand: &'static str, config: &RunConfig) -> Result<Self, CliError> {
        std::fs::create_dir_all(&config.out_dir)
            .map_err(|e| CliError::Io(format!("{}: {e}", config.out_dir.display())))?;
        Ok(Run {
            subcommand,
            seed: config.seed,
            config_digest: config.digest(),
            config: config.clone(),
            out_dir: config.out_dir.clone(),
            started_unix_ms: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0),
            started: Instant::now(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            timings_ms: BTreeMap::new(),
            stage_start: Instant::now(),
        })
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }

    pub fn header_line(&self) -> String {
        format!(
            "# {TOOL} {VERSION} {} seed={} config_digest={}",
            self.subcommand, self.seed, self.config_digest
        )
    }

    fn provenance(&self) -> Value {
        json!({
            "tool": TOOL,
            "version": VERSION,
            "subcommand": self.subcommand,
            "seed": self.seed,
            "config_digest": self.config_digest,
        })
    }

    /// Record the digest of an input file.
    pub fn input(&mut self, key: &'static str, path: &Path) -> Result<(), CliError> {
        let sha256 = file_digest(path).map_err(|e| CliError::from_io(path, e))?;
        self.inputs.insert(key, InputRecord { path: path.to_path_buf(), sha256 });
        Ok(())
    }

    /// Close the current timing stage under `name`.
    pub fn lap(&mut self, name: &str) {
        let now = Instant::now();
        let ms = now.duration_since(self.stage_start).as_secs_f64() * 1e3;
        self.timings_ms.insert(name.to_string(), ms);
        self.stage_start = now;
    }

    fn finish_output(&mut self, name: &str) -> Result<(), CliError> {
        let path = self.out_dir.join(name);
        let digest = file_digest(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.outputs.insert(name.to_string(), digest);
        Ok(())
    }

    /// Write a text artifact behind the provenance line.
    pub fn write_text(
        &mut self,
        name: &str,
        fill: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
    ) -> Result<PathBuf, CliError> {
        let path = self.out_dir.join(name);
        let header = self.header_line();
        write_atomic(&path, |w| {
            writeln!(w, "{header}").map_err(|e| CliError::Io(e.to_string()))?;
            fill(w)
        })?;
        self.finish_output(name)?;
        Ok(path)
    }

    /// Write a JSON artifact: `body`'s fields plus `"provenance"`.
    pub fn write_json(&mut self, name: &str, body: Value) -> Result<PathBuf, CliError> {
        let mut object = serde_json::Map::new();
        object.insert("provenance".into(), self.provenance());
        match body {
            Value::Object(fields) => object.extend(fields),
            other => {
                object.insert("data".into(), other);
            }
        }
        let path = self.out_dir.join(name);
        write_atomic(&path, |w| {
            serde_json::to_writer_pretty(&mut *w, &Value::Object(object)).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(w).map_err(|e| CliError::Io(e.to_string()))
        })?;
        self.finish_output(name)?;
        Ok(path)
    }

    /// Write `<subcommand>.manifest.json` and return its path.
    pub fn finish(self) -> Result<PathBuf, CliError> {
        let manifest = json!({
            "tool": TOOL,
            "version": VERSION,
            "subcommand": self.subcommand,
            "seed": self.seed,
            "config_digest": self.config_digest,
            "config": self.config,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "started_unix_ms": self.started_unix_ms as u64,
            "elapsed_ms": self.started.elapsed().as_secs_f64() * 1e3,
            "timings_ms": self.timings_ms,
        });
        let path = self.out_dir.join(format!("{}.manifest.json", self.subcommand));
        write_atomic(&path, |w| {
            serde_json::to_writer_pretty(&mut *w, &manifest).map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(w).map_err(|e| CliError::Io(e.to_string()))
        })?;
        Ok(path)
    }
}
