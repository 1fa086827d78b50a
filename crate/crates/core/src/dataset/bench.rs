use std::fs;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::image::ImageBuffer;
use crate::pipeline::{augment_sample, fit_to_crop_source, AugmentConfig, AugmentMode};
use crate::rng::RngStream;

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub input_dir: PathBuf,
    pub cfg: AugmentConfig,
    pub jobs: usize,
    pub duration: Duration,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub jobs: usize,
    pub mode: AugmentMode,
    pub inputs: usize,
    pub samples: u64,
    pub wall_seconds: f64,
    pub images_per_sec: f64,
    pub p50_ms: f64,
    pub p99_ms: f64,
}

fn decodable_images(dir: &PathBuf) -> Result<Vec<ImageBuffer>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    Ok(paths
        .iter()
        .filter_map(|p| match ImageBuffer::open(p) {
            Ok(img) => Some(img),
            Err(e) => {
                log::debug!("bench: ignoring {}: {e}", p.display());
                None
            }
        })
        .collect())
}

/// Nearest-rank percentile of sorted samples.
fn percentile(sorted: &[Duration], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1].as_secs_f64() * 1e3
}

/// Runs `augment_sample` in a closed loop on `jobs` worker threads until
/// `duration` has elapsed. Inputs are decoded up front and cycled.
pub fn bench(opts: &BenchOptions) -> Result<BenchReport> {
    opts.cfg.validate()?;
    if opts.jobs == 0 {
        return Err(Error::Config("jobs must be >= 1".into()));
    }
    let mut inputs = decodable_images(&opts.input_dir)?;
    if inputs.is_empty() {
        return Err(Error::NoInputs(opts.input_dir.clone()));
    }
    if opts.cfg.mode == AugmentMode::RandomCrop {
        inputs = inputs
            .iter()
            .map(|img| fit_to_crop_source(img, &opts.cfg))
            .collect::<Result<_>>()?;
    }

    let counter = AtomicU64::new(0);
    let start = Instant::now();
    let per_worker: Vec<Result<Vec<Duration>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..opts.jobs)
            .map(|_| {
                scope.spawn(|| {
                    let mut lat = Vec::new();
                    while start.elapsed() < opts.duration {
                        let i = counter.fetch_add(1, Ordering::Relaxed);
                        let img = &inputs[(i % inputs.len() as u64) as usize];
                        let mut stream = RngStream::derive(opts.seed, "bench", i, 0);
                        let t = Instant::now();
                        let out = augment_sample(img, &opts.cfg, &mut stream)?;
                        lat.push(t.elapsed());
                        std::hint::black_box(out);
                    }
                    Ok(lat)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("bench worker panicked")).collect()
    });
    let wall = start.elapsed().as_secs_f64();

    let mut latencies = Vec::new();
    for w in per_worker {
        latencies.extend(w?);
    }
    latencies.sort_unstable();
    let samples = latencies.len() as u64;
    Ok(BenchReport {
        jobs: opts.jobs,
        mode: opts.cfg.mode,
        inputs: inputs.len(),
        samples,
        wall_seconds: wall,
        images_per_sec: if wall > 0.0 { samples as f64 / wall } else { 0.0 },
        p50_ms: percentile(&latencies, 0.50),
        p99_ms: percentile(&latencies, 0.99),
    })
}
