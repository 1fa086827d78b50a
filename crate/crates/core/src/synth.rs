//! Synthetic annotated corpora for tests, demos and benchmarks.

use std::fs;
use std::path::{Path, PathBuf};

use crate::annotations::{write_voc_xml, AnnotationRecord, ObjectAnnotation};
use crate::error::{Error, Result};
use crate::geometry::BoundingBox;
use crate::image::ImageBuffer;
use crate::rng::RngStream;

#[derive(Debug, Clone)]
pub struct CorpusSpec {
    pub images: usize,
    pub classes: Vec<String>,
    pub min_side: u32,
    pub max_side: u32,
    pub max_objects: usize,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            images: 50,
            classes: ["dog", "animal", "car", "cup", "canine"].map(String::from).to_vec(),
            min_side: 48,
            max_side: 160,
            max_objects: 3,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub images_dir: PathBuf,
    pub annotations_dir: PathBuf,
    pub records: Vec<AnnotationRecord>,
}

fn below(s: &mut RngStream, n: u32) -> u32 {
    ((s.unit_float() * n as f64) as u32).min(n - 1)
}

/// RGB image with smooth gradients and a few flat rectangles.
pub fn textured_image(width: u32, height: u32, stream: &mut RngStream) -> ImageBuffer {
    let phase: [u32; 3] = [below(stream, 256), below(stream, 256), below(stream, 256)];
    let rects: Vec<(BoundingBox, u8)> = (0..3)
        .map(|_| {
            let x0 = below(stream, width);
            let y0 = below(stream, height);
            let x1 = x0 + 1 + below(stream, width - x0);
            let y1 = y0 + 1 + below(stream, height - y0);
            (BoundingBox { xmin: x0, ymin: y0, xmax: x1, ymax: y1 }, below(stream, 256) as u8)
        })
        .collect();
    ImageBuffer::from_fn(width, height, 3, |x, y, c| {
        for (r, v) in &rects {
            if x >= r.xmin && x < r.xmax && y >= r.ymin && y < r.ymax {
                return v.wrapping_add(c * 40);
            }
        }
        ((x * (3 + c as u32) + y * (5 - c as u32) + phase[c as usize]) % 256) as u8
    })
    .expect("valid dimensions")
}

/// Writes `images/<id>.png` and `annotations/<id>.xml` under `root`.
pub fn write_corpus(root: &Path, spec: &CorpusSpec) -> Result<Corpus> {
    if spec.classes.is_empty() || spec.min_side < 3 || spec.min_side > spec.max_side || spec.max_objects == 0 {
        return Err(Error::Config("degenerate corpus spec".into()));
    }
    let images_dir = root.join("images");
    let annotations_dir = root.join("annotations");
    for d in [&images_dir, &annotations_dir] {
        fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
    }
    let mut records = Vec::with_capacity(spec.images);
    for i in 0..spec.images {
        let id = format!("img_{i:05}");
        let mut s = RngStream::derive(spec.seed, &id, 0, 0);
        let span = spec.max_side - spec.min_side + 1;
        let w = spec.min_side + below(&mut s, span);
        let h = spec.min_side + below(&mut s, span);
        let n = 1 + below(&mut s, spec.max_objects as u32) as usize;
        let objects = (0..n)
            .map(|_| {
                let bw = 2 + below(&mut s, w - 2);
                let bh = 2 + below(&mut s, h - 2);
                let x0 = below(&mut s, w - bw + 1);
                let y0 = below(&mut s, h - bh + 1);
                ObjectAnnotation {
                    class_label: spec.classes[below(&mut s, spec.classes.len() as u32) as usize].clone(),
                    bbox: BoundingBox { xmin: x0, ymin: y0, xmax: x0 + bw, ymax: y0 + bh },
                }
            })
            .collect();
        let img = textured_image(w, h, &mut s);
        let file = format!("{id}.png");
        img.save_png(images_dir.join(&file))?;
        let record = AnnotationRecord {
            image_id: id.clone(),
            image_path: PathBuf::from(&file),
            image_w: w,
            image_h: h,
            objects,
        };
        let xml_path = annotations_dir.join(format!("{id}.xml"));
        fs::write(&xml_path, write_voc_xml(&record)).map_err(|e| Error::io(&xml_path, e))?;
        records.push(AnnotationRecord {
            image_path: images_dir.join(&file),
            ..record
        });
    }
    Ok(Corpus {
        images_dir,
        annotations_dir,
        records,
    })
}
