//! Robot-style preprocessing for web-annotated image collections.
//!
//! Objects are cut out along enlarged bounding boxes into crop datasets,
//! optionally filtered so that no class is an IS-A ancestor of another,
//! then fed through a random-zoom (or fixed random-crop) augmentation layer
//! with bilinear resizing and horizontal flips. Every random choice comes
//! from a splittable splitmix64 stream, so outputs are identical regardless
//! of thread count.

pub mod annotations;
pub mod dataset;
mod error;
pub mod geometry;
pub mod image;
pub mod pipeline;
pub mod rng;
pub mod synth;

pub use annotations::{AnnotationRecord, ClassHierarchy, SelectionMode};
pub use dataset::{BuildReport, ManifestEntry};
pub use error::{Error, Result};
pub use geometry::{BoundingBox, ZoomRange, ZoomWindow};
pub use image::ImageBuffer;
pub use pipeline::{augment_batch, augment_sample, AugmentConfig, AugmentMode};
pub use rng::{rng_reference_vector, RngStream};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
