//! Dataset orchestration: crop-dataset builds, translated variants, offline
//! augmentation, manifest statistics and throughput benchmarking.
//!
//! Work is spread over a rayon pool of `jobs` threads. Outputs never depend
//! on scheduling: random draws come from per-item derived streams and
//! manifests are sorted before they are written.

mod augment;
mod bench;
mod build;
mod inspect;
mod manifest;
mod translate;

use std::collections::BTreeSet;
use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::image::ImageBuffer;

pub use augment::{augment_offline, augmented_path, AugmentOptions};
pub use bench::{bench, BenchOptions, BenchReport};
pub use build::{build_crops, load_annotations, BuildCropsOptions, LoadedAnnotations};
pub use inspect::{inspect, InspectReport, HISTOGRAM_BINS};
pub use manifest::{manifest_root, parse_manifest, read_manifest, write_manifest, ManifestEntry, MANIFEST_FILE};
pub use translate::{translate_dataset, translation_draws, TranslateOptions};

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BuildReport {
    pub images_seen: u64,
    pub objects_seen: u64,
    pub crops_written: u64,
    pub objects_dropped: u64,
    pub classes_selected: BTreeSet<String>,
    /// Seconds.
    pub wall_time: f64,
    /// Images per second.
    pub throughput: f64,
}

impl BuildReport {
    pub(crate) fn finish(&mut self, elapsed: Duration) {
        self.wall_time = elapsed.as_secs_f64();
        self.throughput = if self.wall_time > 0.0 {
            self.images_seen as f64 / self.wall_time
        } else {
            0.0
        };
    }
}

/// Exclusive claim on an output directory, released on drop.
#[derive(Debug)]
pub struct OutDirLock {
    path: PathBuf,
}

pub const LOCK_FILE: &str = ".zoomcrop.lock";

impl OutDirLock {
    /// Creates `dir` if needed and takes its lock file.
    pub fn acquire(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(OutDirLock { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Locked(dir.to_path_buf())),
            Err(e) => Err(Error::io(&path, e)),
        }
    }
}

impl Drop for OutDirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

pub(crate) fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    if jobs == 0 {
        return Err(Error::Config("jobs must be >= 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Directory name for a class label; anything outside `[A-Za-z0-9._-]`
/// becomes `_`.
pub fn class_dir_name(label: &str) -> String {
    let s: String = label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' })
        .collect();
    if s.is_empty() || s.chars().all(|c| c == '.') {
        format!("_{s}")
    } else {
        s
    }
}

pub(crate) fn write_png(root: &Path, rel: &Path, img: &ImageBuffer) -> Result<()> {
    let full = root.join(rel);
    if let Some(parent) = full.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    img.save_png(&full)
}
