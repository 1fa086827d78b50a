use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use super::{class_dir_name, thread_pool, write_manifest, write_png, BuildReport, ManifestEntry, OutDirLock, MANIFEST_FILE};
use crate::annotations::{parse_hierarchy, parse_voc_xml, select_classes, AnnotationRecord, ClassHierarchy, SelectionMode};
use crate::error::{Error, Result};
use crate::geometry::{enlarge_box, BoundingBox};
use crate::image::{crop, ImageBuffer};

#[derive(Debug, Clone)]
pub struct BuildCropsOptions {
    pub annotations_dir: PathBuf,
    pub images_dir: PathBuf,
    /// Required in clean mode.
    pub hierarchy_file: Option<PathBuf>,
    pub mode: SelectionMode,
    pub enlarge_factor: f64,
    pub out_dir: PathBuf,
    pub jobs: usize,
}

/// Annotation files that parsed, sorted by `image_id`.
#[derive(Debug, Default)]
pub struct LoadedAnnotations {
    pub records: Vec<AnnotationRecord>,
    /// Labels of objects dropped at parse time for degenerate boxes.
    pub dropped_labels: Vec<String>,
    pub failed_files: Vec<PathBuf>,
}

const IMAGE_EXTENSIONS: &[&str] = &["JPEG", "jpeg", "jpg", "JPG", "png", "PNG"];

fn resolve_image(images_dir: &Path, filename: &Path, image_id: &str) -> PathBuf {
    let direct = images_dir.join(filename);
    if direct.is_file() {
        return direct;
    }
    // ImageNet annotations often omit the extension in <filename>
    let stem = filename
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| image_id.to_string());
    IMAGE_EXTENSIONS
        .iter()
        .map(|ext| images_dir.join(format!("{stem}.{ext}")))
        .find(|p| p.is_file())
        .unwrap_or(direct)
}

/// Parses every `*.xml` file in `annotations_dir`. Files that fail to parse
/// are logged and listed in `failed_files`. `image_id` is the annotation
/// file stem and `image_path` is resolved against `images_dir`.
pub fn load_annotations(annotations_dir: &Path, images_dir: &Path) -> Result<LoadedAnnotations> {
    let mut files: Vec<PathBuf> = fs::read_dir(annotations_dir)
        .map_err(|e| Error::io(annotations_dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("xml")))
        .collect();
    files.sort();

    let parsed: Vec<_> = files
        .par_iter()
        .map(|path| {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            let mut p = parse_voc_xml(&bytes)?;
            if let Some(stem) = path.file_stem() {
                p.record.image_id = stem.to_string_lossy().into_owned();
            }
            p.record.image_path = resolve_image(images_dir, &p.record.image_path, &p.record.image_id);
            Ok::<_, Error>(p)
        })
        .collect();

    let mut out = LoadedAnnotations::default();
    for (path, res) in files.into_iter().zip(parsed) {
        match res {
            Ok(p) => {
                out.dropped_labels.extend(p.dropped.into_iter().map(|d| d.class_label));
                out.records.push(p.record);
            }
            Err(e) => {
                log::warn!("skipping {}: {e}", path.display());
                out.failed_files.push(path);
            }
        }
    }
    out.records.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    Ok(out)
}

fn load_hierarchy(opts: &BuildCropsOptions) -> Result<ClassHierarchy> {
    match (&opts.hierarchy_file, opts.mode) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_hierarchy(&text)
        }
        (None, SelectionMode::Clean) => Err(Error::Config("clean mode requires a hierarchy file".into())),
        (None, SelectionMode::Dirty) => Ok(ClassHierarchy::default()),
    }
}

/// Crops every selected object out of one image.
fn crop_record(
    rec: &AnnotationRecord,
    selected: &BTreeSet<String>,
    factor: f64,
    out_dir: &Path,
) -> (Vec<ManifestEntry>, u64) {
    let eligible: Vec<_> = rec
        .objects
        .iter()
        .enumerate()
        .filter(|(_, o)| selected.contains(&o.class_label))
        .collect();
    if eligible.is_empty() {
        return (Vec::new(), 0);
    }
    let img = match ImageBuffer::open(&rec.image_path) {
        Ok(img) => img,
        Err(e) => {
            log::warn!("{}: {e}; dropping {} objects", rec.image_id, eligible.len());
            return (Vec::new(), eligible.len() as u64);
        }
    };
    let (w, h) = img.dimensions();
    if (w, h) != (rec.image_w, rec.image_h) {
        log::warn!(
            "{}: annotation says {}x{}, image is {w}x{h}; clamping boxes to the image",
            rec.image_id,
            rec.image_w,
            rec.image_h
        );
    }
    let mut entries = Vec::with_capacity(eligible.len());
    let mut dropped = 0;
    for (idx, obj) in eligible {
        let result = (|| {
            let b = obj.bbox;
            let original = BoundingBox::new(b.xmin.min(w), b.ymin.min(h), b.xmax.min(w), b.ymax.min(h))?;
            let enlarged = enlarge_box(&original, factor, w, h)?;
            let patch = crop(&img, &enlarged)?;
            let rel = PathBuf::from(class_dir_name(&obj.class_label)).join(format!("{}_{idx}.png", rec.image_id));
            write_png(out_dir, &rel, &patch)?;
            Ok::<_, Error>(ManifestEntry {
                image_id: rec.image_id.clone(),
                source_path: rec.image_path.clone(),
                class_label: obj.class_label.clone(),
                box_original: original,
                box_enlarged: enlarged,
                output_path: rel,
                out_w: patch.width(),
                out_h: patch.height(),
                object_index: idx as u32,
            })
        })();
        match result {
            Ok(e) => entries.push(e),
            Err(e) => {
                log::warn!("{} object {idx}: {e}", rec.image_id);
                dropped += 1;
            }
        }
    }
    (entries, dropped)
}

/// Builds a crop dataset: one PNG per selected object, cut along its
/// enlarged box, plus `manifest.jsonl` ordered by `(image_id, object_index)`.
pub fn build_crops(opts: &BuildCropsOptions) -> Result<(BuildReport, Vec<ManifestEntry>)> {
    let start = Instant::now();
    if !(opts.enlarge_factor >= 0.0 && opts.enlarge_factor.is_finite()) {
        return Err(Error::Config(format!("enlarge factor {} must be >= 0", opts.enlarge_factor)));
    }
    let pool = thread_pool(opts.jobs)?;
    let hierarchy = load_hierarchy(opts)?;
    let _lock = OutDirLock::acquire(&opts.out_dir)?;

    let loaded = pool.install(|| load_annotations(&opts.annotations_dir, &opts.images_dir))?;
    let all_classes: BTreeSet<String> = loaded
        .records
        .iter()
        .flat_map(|r| r.classes().map(str::to_string))
        .chain(loaded.dropped_labels.iter().cloned())
        .collect();
    let selected = select_classes(&all_classes, &hierarchy, opts.mode);

    let results: Vec<_> = pool.install(|| {
        loaded
            .records
            .par_iter()
            .map(|rec| crop_record(rec, &selected, opts.enlarge_factor, &opts.out_dir))
            .collect()
    });

    let mut report = BuildReport {
        images_seen: loaded.records.len() as u64,
        objects_seen: loaded.records.iter().map(|r| r.objects.len() as u64).sum::<u64>()
            + loaded.dropped_labels.len() as u64,
        objects_dropped: loaded.dropped_labels.iter().filter(|l| selected.contains(*l)).count() as u64,
        classes_selected: selected,
        ..Default::default()
    };
    let mut manifest = Vec::new();
    for (entries, dropped) in results {
        report.objects_dropped += dropped;
        manifest.extend(entries);
    }
    manifest.sort_by(|a, b| (&a.image_id, a.object_index).cmp(&(&b.image_id, b.object_index)));
    report.crops_written = manifest.len() as u64;
    write_manifest(opts.out_dir.join(MANIFEST_FILE), &manifest)?;
    report.finish(start.elapsed());
    Ok((report, manifest))
}
