//! The augmentation chain applied to each object crop:
//! zoom window (or fixed random crop) -> bilinear resize -> optional flip.
//!
//! Every sample consumes exactly four draws from its stream, in this order:
//! zoom factor, x position, y position, flip coin. Random-crop mode still
//! consumes the zoom draw, so both modes stay aligned on the same seed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{crop_window, zoom_window, ZoomRange};
use crate::image::{bilinear_resize, crop, hflip, ImageBuffer};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AugmentMode {
    Zoom,
    RandomCrop,
}

/// Numeric knobs of the pipeline. Serialized as a flat JSON object whose
/// keys are the field names; missing keys take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    pub enlarge_factor: f64,
    pub zoom_min: f64,
    pub zoom_max: f64,
    pub target_w: u32,
    pub target_h: u32,
    pub flip_prob: f64,
    pub mode: AugmentMode,
    pub crop_src_w: u32,
    pub crop_src_h: u32,
    pub samples_per_image: u32,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            enlarge_factor: 0.20,
            zoom_min: 1.0,
            zoom_max: 2.0,
            target_w: 227,
            target_h: 227,
            flip_prob: 0.5,
            mode: AugmentMode::Zoom,
            crop_src_w: 256,
            crop_src_h: 256,
            samples_per_image: 1,
        }
    }
}

impl AugmentConfig {
    /// AlexNet-style random cropping: 227x227 patches out of 256x256.
    pub fn random_crop_227() -> Self {
        AugmentConfig {
            mode: AugmentMode::RandomCrop,
            ..Default::default()
        }
    }

    /// Inception-style random cropping: 299x299 patches out of 384x384.
    pub fn random_crop_299() -> Self {
        AugmentConfig {
            mode: AugmentMode::RandomCrop,
            target_w: 299,
            target_h: 299,
            crop_src_w: 384,
            crop_src_h: 384,
            ..Default::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: AugmentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config JSON: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn zoom_range(&self) -> Result<ZoomRange> {
        ZoomRange::new(self.zoom_min, self.zoom_max)
    }

    pub fn validate(&self) -> Result<()> {
        self.zoom_range()?;
        if !(self.enlarge_factor >= 0.0 && self.enlarge_factor.is_finite()) {
            return Err(Error::Config(format!("enlarge_factor {} must be >= 0", self.enlarge_factor)));
        }
        if !(0.0..=1.0).contains(&self.flip_prob) {
            return Err(Error::Config(format!("flip_prob {} outside [0, 1]", self.flip_prob)));
        }
        if self.target_w == 0 || self.target_h == 0 {
            return Err(Error::Config("target dimensions must be >= 1".into()));
        }
        if self.samples_per_image == 0 {
            return Err(Error::Config("samples_per_image must be >= 1".into()));
        }
        if self.mode == AugmentMode::RandomCrop
            && (self.target_w > self.crop_src_w || self.target_h > self.crop_src_h)
        {
            return Err(Error::Config(format!(
                "random_crop target {}x{} exceeds crop source {}x{}",
                self.target_w, self.target_h, self.crop_src_w, self.crop_src_h
            )));
        }
        Ok(())
    }
}

/// The four uniform draws that fully determine one augmented sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleDraws {
    pub zoom: f64,
    pub x: f64,
    pub y: f64,
    pub flip: f64,
}

impl SampleDraws {
    pub fn from_stream(stream: &mut RngStream) -> Self {
        let zoom = stream.unit_float();
        let x = stream.unit_float();
        let y = stream.unit_float();
        let flip = stream.unit_float();
        SampleDraws { zoom, x, y, flip }
    }

    pub fn zoom_factor(&self, cfg: &AugmentConfig) -> f64 {
        cfg.zoom_min + self.zoom * (cfg.zoom_max - cfg.zoom_min)
    }

    pub fn flips(&self, cfg: &AugmentConfig) -> bool {
        self.flip < cfg.flip_prob
    }
}

/// Resizes an arbitrary crop to the random-crop source size.
pub fn fit_to_crop_source(img: &ImageBuffer, cfg: &AugmentConfig) -> Result<ImageBuffer> {
    bilinear_resize(img, cfg.crop_src_w, cfg.crop_src_h)
}

/// Applies the chain with explicit draws.
pub fn augment_with_draws(img: &ImageBuffer, cfg: &AugmentConfig, draws: SampleDraws) -> Result<ImageBuffer> {
    cfg.validate()?;
    let (w, h) = img.dimensions();
    let window = match cfg.mode {
        AugmentMode::Zoom => {
            let z = draws.zoom_factor(cfg).min(cfg.zoom_max);
            zoom_window(w, h, z, cfg.zoom_range()?, draws.x, draws.y)?.bbox
        }
        AugmentMode::RandomCrop => {
            if (w, h) != (cfg.crop_src_w, cfg.crop_src_h) {
                return Err(Error::InvalidImage(format!(
                    "random_crop expects a {}x{} input, got {w}x{h}",
                    cfg.crop_src_w, cfg.crop_src_h
                )));
            }
            crop_window(w, h, cfg.target_w, cfg.target_h, draws.x, draws.y)?
        }
    };
    let patch = crop(img, &window)?;
    let resized = bilinear_resize(&patch, cfg.target_w, cfg.target_h)?;
    Ok(if draws.flips(cfg) { hflip(&resized) } else { resized })
}

/// One augmented sample; consumes exactly four draws from `stream`.
pub fn augment_sample(img: &ImageBuffer, cfg: &AugmentConfig, stream: &mut RngStream) -> Result<ImageBuffer> {
    let draws = SampleDraws::from_stream(stream);
    augment_with_draws(img, cfg, draws)
}

/// `cfg.samples_per_image` samples; element `i` uses the stream derived
/// from `(seed, key, i, epoch)`.
pub fn augment_batch(
    img: &ImageBuffer,
    cfg: &AugmentConfig,
    seed: u64,
    key: &str,
    epoch: u64,
) -> Result<Vec<ImageBuffer>> {
    cfg.validate()?;
    (0..cfg.samples_per_image as u64)
        .map(|i| augment_sample(img, cfg, &mut RngStream::derive(seed, key, i, epoch)))
        .collect()
}
