use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use zoomcrop::annotations::SelectionMode;
use zoomcrop::dataset::{self, manifest_root, read_manifest, AugmentOptions, BenchOptions, BuildCropsOptions, TranslateOptions};
use zoomcrop::{rng_reference_vector, AugmentConfig};

#[derive(Parser)]
#[command(name = "zoomcrop", version, about = "Bounding-box crop datasets and random-zoom augmentation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Global seed for all random draws.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Augmentation config: a JSON file, or an inline JSON object.
    #[arg(long)]
    config: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Clean,
    Dirty,
}

#[derive(Subcommand)]
enum Command {
    /// Cut every selected object out along its enlarged bounding box.
    BuildCrops {
        #[arg(long)]
        annotations: PathBuf,
        #[arg(long)]
        images: PathBuf,
        /// `child<TAB>parent` IS-A file; required for --mode clean.
        #[arg(long)]
        hierarchy: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Re-crop a manifest's boxes after random translations.
    Translate {
        #[arg(long)]
        manifest: PathBuf,
        /// Maximum shift as a fraction of box size, e.g. 0.1, 0.2, 0.3.
        #[arg(long)]
        fraction: f64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Write augmented samples for every crop in a manifest.
    Augment {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        epoch: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Print manifest statistics as JSON.
    Inspect {
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Measure augmentation throughput and latency.
    Bench {
        #[arg(long)]
        input: PathBuf,
        /// Seconds to run.
        #[arg(long, default_value_t = 5.0)]
        duration: f64,
        /// Also write the JSON report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Print the first N outputs of splitmix64 from a seed, one per line.
    RngVector {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
}

fn load_config(arg: Option<&str>) -> Result<AugmentConfig> {
    let Some(arg) = arg else {
        return Ok(AugmentConfig::default());
    };
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("reading config {arg}"))?
    };
    Ok(AugmentConfig::from_json(&text)?)
}

fn print_json(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::BuildCrops {
            annotations,
            images,
            hierarchy,
            mode,
            out,
            common,
        } => {
            let cfg = load_config(common.config.as_deref())?;
            let opts = BuildCropsOptions {
                annotations_dir: annotations,
                images_dir: images,
                hierarchy_file: hierarchy,
                mode: match mode {
                    Mode::Clean => SelectionMode::Clean,
                    Mode::Dirty => SelectionMode::Dirty,
                },
                enlarge_factor: cfg.enlarge_factor,
                out_dir: out,
                jobs: common.jobs,
            };
            let (report, _) = dataset::build_crops(&opts)?;
            print_json(&report)
        }
        Command::Translate {
            manifest,
            fraction,
            out,
            common,
        } => {
            let entries = read_manifest(&manifest)?;
            let opts = TranslateOptions {
                fraction,
                out_dir: out,
                seed: common.seed,
                jobs: common.jobs,
            };
            let (report, _) = dataset::translate_dataset(&entries, &opts)?;
            print_json(&report)
        }
        Command::Augment {
            manifest,
            out,
            epoch,
            common,
        } => {
            let cfg = load_config(common.config.as_deref())?;
            let entries = read_manifest(&manifest)?;
            let opts = AugmentOptions {
                cfg,
                crops_root: manifest_root(&manifest),
                out_dir: out,
                jobs: common.jobs,
                seed: common.seed,
                epoch,
            };
            let report = dataset::augment_offline(&entries, &opts)?;
            print_json(&report)
        }
        Command::Inspect { manifest, common } => {
            let cfg = load_config(common.config.as_deref())?;
            let entries = read_manifest(&manifest)?;
            print_json(&dataset::inspect(&entries, cfg.enlarge_factor))
        }
        Command::Bench {
            input,
            duration,
            out,
            common,
        } => {
            let cfg = load_config(common.config.as_deref())?;
            let duration = Duration::try_from_secs_f64(duration).context("--duration must be a non-negative number")?;
            let report = dataset::bench(&BenchOptions {
                input_dir: input,
                cfg,
                jobs: common.jobs,
                duration,
                seed: common.seed,
            })?;
            if let Some(path) = out {
                std::fs::write(&path, serde_json::to_vec_pretty(&report)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            print_json(&report)
        }
        Command::RngVector { seed, n } => {
            for v in rng_reference_vector(seed, n as usize) {
                println!("0x{v:016X}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
