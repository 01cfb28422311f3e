use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::csv::{Cell, CsvTable};
use super::scenarios::compute;
use super::{HarnessError, RunConfig, Scenario};

pub const MANIFEST_FILE: &str = "manifest.csv";
pub const CONFIG_SNAPSHOT_FILE: &str = "config.txt";

/// SHA-256 of `blob <len>\0<bytes>`, the object header git uses, as hex.
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    hex(&h.finalize())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OutputFile {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub scenario: Scenario,
    pub config: RunConfig,
    /// Hash over the canonical config text and any input file it names.
    pub input_hash: String,
    /// Not written to disk, so that outputs stay byte-identical.
    pub wall_time: Duration,
    /// Every file written, manifest last and not listing itself.
    pub outputs: Vec<OutputFile>,
}

/// Runs `config` and writes its CSV files, a canonical config snapshot and a
/// manifest into `out_dir`, creating it if needed. A relative `input_csv`
/// resolves against `input_root`.
pub fn run_scenario(config: &RunConfig, input_root: &Path, out_dir: &Path) -> Result<RunRecord, HarnessError> {
    let start = Instant::now();
    let snapshot = config.to_text();
    let mut input_hash = content_hash(snapshot.as_bytes());
    if let Some(rel) = &config.input_csv {
        let path = input_root.join(rel);
        let data = fs::read(&path).map_err(|e| HarnessError::io(&path, e))?;
        input_hash = content_hash(format!("{input_hash}\n{}\n", content_hash(&data)).as_bytes());
    }
    let tables = compute(config, input_root)?;

    fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let mut files: Vec<(String, String)> = vec![(CONFIG_SNAPSHOT_FILE.into(), snapshot)];
    files.extend(tables.into_iter().map(|(name, t)| (name.to_string(), t.render())));
    let mut outputs = Vec::with_capacity(files.len() + 1);
    let mut manifest = CsvTable::new(&["file", "bytes", "sha256"]);
    for (name, text) in &files {
        let path = out_dir.join(name);
        fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
        let entry = OutputFile { name: name.clone(), bytes: text.len() as u64, sha256: hex(&Sha256::digest(text)) };
        manifest.push(vec![Cell::from(name.as_str()), Cell::Int(entry.bytes as i64), Cell::from(entry.sha256.as_str())]);
        outputs.push(entry);
    }
    let manifest_text = manifest.render();
    let path = out_dir.join(MANIFEST_FILE);
    fs::write(&path, &manifest_text).map_err(|e| HarnessError::io(&path, e))?;
    outputs.push(OutputFile {
        name: MANIFEST_FILE.into(),
        bytes: manifest_text.len() as u64,
        sha256: hex(&Sha256::digest(&manifest_text)),
    });
    Ok(RunRecord { scenario: config.scenario, config: config.clone(), input_hash, wall_time: start.elapsed(), outputs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_matches_git_object_format() {
        // `printf 'hello\n' | git hash-object --stdin` with SHA-256 object format.
        assert_eq!(
            content_hash(b"hello\n"),
            "2cf8d83d9ee29543b34a87727421fdecb7e3f3a183d337639025de576db9ebb4"
        );
        assert_eq!(content_hash(b""), content_hash(b""));
        assert_ne!(content_hash(b"a"), content_hash(b"b"));
    }
}
