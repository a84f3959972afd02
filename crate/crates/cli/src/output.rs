//! CSV tables and JSON run manifests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// 17 significant digits in scientific notation.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            self.text.push_str(c.as_ref());
        }
        self.text.push('\n');
    }

    pub fn as_bytes(&self) -> &[u8] {
        self.text.as_bytes()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// Sidecar manifest path of a data file: `run.csv` -> `run.manifest.json`.
pub fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("manifest.json")
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Collects the outputs of one run and writes them with their manifest.
#[derive(Debug)]
pub struct Run {
    command: &'static str,
    started: Instant,
    outputs: Vec<(String, String)>,
}

impl Run {
    pub fn start(command: &'static str) -> Self {
        Self { command, started: Instant::now(), outputs: Vec::new() }
    }

    pub fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<(), CliError> {
        write_bytes(path, bytes)?;
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        self.outputs.push((name, sha256_hex(bytes)));
        Ok(())
    }

    /// Writes the manifest. Output files are listed by file name, so the
    /// manifest does not depend on where the run was placed.
    pub fn finish(self, path: &Path, seed: u64, config: Value, results: Value) -> Result<(), CliError> {
        let outputs: Vec<Value> =
            self.outputs.iter().map(|(name, digest)| json!({ "file": name, "sha256": digest })).collect();
        let manifest = json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": seed,
            "config": config,
            "results": results,
            "outputs": outputs,
            "wall_time_s": self.started.elapsed().as_secs_f64(),
        });
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        write_bytes(path, text.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_is_fixed_width_scientific() {
        assert_eq!(fmt_f(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f(2.0 / 3.0), "6.6666666666666663e-1");
        assert_eq!(fmt_f(2.0 / 3.0).parse::<f64>().unwrap(), 2.0 / 3.0);
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.row(&["1", "2"]);
        assert_eq!(t.as_bytes(), b"a,b\n1,2\n");
    }

    #[test]
    fn digests_and_paths() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        assert_eq!(manifest_path(Path::new("x/run.csv")), PathBuf::from("x/run.manifest.json"));
    }
}
