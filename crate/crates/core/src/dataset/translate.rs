use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use super::{class_dir_name, thread_pool, write_manifest, write_png, BuildReport, ManifestEntry, OutDirLock, MANIFEST_FILE};
use crate::error::{Error, Result};
use crate::geometry::translate_box;
use crate::image::{crop, ImageBuffer};
use crate::rng::RngStream;

#[derive(Debug, Clone)]
pub struct TranslateOptions {
    /// Maximum shift as a fraction of the box side (0.1, 0.2, 0.3, ...).
    pub fraction: f64,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub jobs: usize,
}

/// Signed draws in `[-1, 1)` for entry `index`.
pub fn translation_draws(seed: u64, image_id: &str, index: u64) -> (f64, f64) {
    let mut s = RngStream::derive(seed, image_id, index, 0);
    let ux = 2.0 * s.unit_float() - 1.0;
    let uy = 2.0 * s.unit_float() - 1.0;
    (ux, uy)
}

/// Re-crops every entry's original box after a random shift of up to
/// `fraction` of its size, slid back inside the source image.
///
/// Each new entry records the shifted box as both `box_original` and
/// `box_enlarged` (the crop is the shifted box itself), so crop dimensions
/// equal the input entry's original box. The input manifest is not touched.
pub fn translate_dataset(
    manifest: &[ManifestEntry],
    opts: &TranslateOptions,
) -> Result<(BuildReport, Vec<ManifestEntry>)> {
    let start = Instant::now();
    if !(opts.fraction >= 0.0 && opts.fraction.is_finite()) {
        return Err(Error::Config(format!("translation fraction {} must be >= 0", opts.fraction)));
    }
    if let Some(missing) = manifest.iter().find(|e| !e.source_path.is_file()) {
        return Err(Error::MissingSource(missing.source_path.clone()));
    }
    let pool = thread_pool(opts.jobs)?;
    let _lock = OutDirLock::acquire(&opts.out_dir)?;

    // decode each source once
    let mut by_source: BTreeMap<&Path, Vec<usize>> = BTreeMap::new();
    for (i, e) in manifest.iter().enumerate() {
        by_source.entry(e.source_path.as_path()).or_default().push(i);
    }
    let groups: Vec<_> = by_source.into_iter().collect();

    let results: Vec<Result<Vec<(usize, ManifestEntry)>>> = pool.install(|| {
        groups
            .par_iter()
            .map(|(source, indices)| {
                let img = ImageBuffer::open(source)?;
                let (w, h) = img.dimensions();
                indices
                    .iter()
                    .map(|&i| {
                        let e = &manifest[i];
                        let (ux, uy) = translation_draws(opts.seed, &e.image_id, i as u64);
                        let moved = translate_box(&e.box_original, opts.fraction, w, h, ux, uy)?;
                        let patch = crop(&img, &moved)?;
                        let rel = PathBuf::from(class_dir_name(&e.class_label))
                            .join(format!("{}_{}.png", e.image_id, e.object_index));
                        write_png(&opts.out_dir, &rel, &patch)?;
                        Ok((
                            i,
                            ManifestEntry {
                                box_original: moved,
                                box_enlarged: moved,
                                output_path: rel,
                                out_w: patch.width(),
                                out_h: patch.height(),
                                ..e.clone()
                            },
                        ))
                    })
                    .collect()
            })
            .collect()
    });

    let mut out: Vec<(usize, ManifestEntry)> = Vec::with_capacity(manifest.len());
    for r in results {
        out.extend(r?);
    }
    out.sort_by_key(|(i, _)| *i);
    let entries: Vec<ManifestEntry> = out.into_iter().map(|(_, e)| e).collect();
    write_manifest(opts.out_dir.join(MANIFEST_FILE), &entries)?;

    let mut report = BuildReport {
        images_seen: groups.len() as u64,
        objects_seen: manifest.len() as u64,
        crops_written: entries.len() as u64,
        classes_selected: entries.iter().map(|e| e.class_label.clone()).collect(),
        ..Default::default()
    };
    report.finish(start.elapsed());
    Ok((report, entries))
}
