use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;

/// One emitted crop with its provenance. Serialized as a single JSON line.
///
/// `output_path` is relative to the directory holding the manifest;
/// `source_path` is stored as it was resolved at build time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub image_id: String,
    pub source_path: PathBuf,
    pub class_label: String,
    pub box_original: BoundingBox,
    pub box_enlarged: BoundingBox,
    pub output_path: PathBuf,
    pub out_w: u32,
    pub out_h: u32,
    pub object_index: u32,
}

impl ManifestEntry {
    /// Stable per-crop identifier, `<image_id>_<object_index>`.
    pub fn crop_key(&self) -> String {
        format!("{}_{}", self.image_id, self.object_index)
    }
}

pub const MANIFEST_FILE: &str = "manifest.jsonl";

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::parse_at(i + 1, e.to_string())))
        .collect()
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let entry = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: Some(i + 1),
            message: format!("{}: {e}", path.display()),
        })?;
        out.push(entry);
    }
    Ok(out)
}

pub fn write_manifest(path: impl AsRef<Path>, entries: &[ManifestEntry]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for e in entries {
        serde_json::to_writer(&mut w, e).map_err(|e| Error::io(path, e.into()))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Directory against which a manifest's relative `output_path`s resolve.
pub fn manifest_root(manifest_path: &Path) -> PathBuf {
    manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}
