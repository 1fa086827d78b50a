use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use super::{class_dir_name, thread_pool, write_png, BuildReport, ManifestEntry, OutDirLock};
use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::pipeline::{augment_batch, fit_to_crop_source, AugmentConfig, AugmentMode};

#[derive(Debug, Clone)]
pub struct AugmentOptions {
    pub cfg: AugmentConfig,
    /// Directory that the manifest's `output_path`s are relative to.
    pub crops_root: PathBuf,
    pub out_dir: PathBuf,
    pub jobs: usize,
    pub seed: u64,
    pub epoch: u64,
}

/// Relative path of sample `k` of an entry's augmented outputs.
pub fn augmented_path(entry: &ManifestEntry, k: u32) -> PathBuf {
    PathBuf::from(class_dir_name(&entry.class_label))
        .join(format!("{}_{}_{k}.png", entry.image_id, entry.object_index))
}

fn augment_entry(entry: &ManifestEntry, opts: &AugmentOptions, crops_root: &Path) -> Result<u64> {
    let mut img = ImageBuffer::open(crops_root.join(&entry.output_path))?;
    if opts.cfg.mode == AugmentMode::RandomCrop {
        img = fit_to_crop_source(&img, &opts.cfg)?;
    }
    let samples = augment_batch(&img, &opts.cfg, opts.seed, &entry.crop_key(), opts.epoch)?;
    for (k, s) in samples.iter().enumerate() {
        write_png(&opts.out_dir, &augmented_path(entry, k as u32), s)?;
    }
    Ok(samples.len() as u64)
}

/// Materialises `samples_per_image` augmented samples for every crop.
///
/// Sample `k` of a crop uses the stream derived from
/// `(seed, "<image_id>_<object_index>", k, epoch)`. In random-crop mode the
/// crop is first resized to `crop_src_w x crop_src_h`. Unreadable crops are
/// logged and counted in `objects_dropped`.
pub fn augment_offline(manifest: &[ManifestEntry], opts: &AugmentOptions) -> Result<BuildReport> {
    let start = Instant::now();
    opts.cfg.validate()?;
    let pool = thread_pool(opts.jobs)?;
    let _lock = OutDirLock::acquire(&opts.out_dir)?;

    let results: Vec<Result<u64>> = pool.install(|| {
        manifest
            .par_iter()
            .map(|e| augment_entry(e, opts, &opts.crops_root))
            .collect()
    });

    let mut report = BuildReport {
        images_seen: manifest.len() as u64,
        objects_seen: manifest.len() as u64,
        classes_selected: manifest.iter().map(|e| e.class_label.clone()).collect(),
        ..Default::default()
    };
    for (e, r) in manifest.iter().zip(results) {
        match r {
            Ok(n) => report.crops_written += n,
            // configuration problems are fatal; everything else is per-file
            Err(err @ Error::Config(_)) => return Err(err),
            Err(err) => {
                log::warn!("skipping {}: {err}", e.output_path.display());
                report.objects_dropped += 1;
            }
        }
    }
    report.finish(start.elapsed());
    Ok(report)
}
