use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("box ({xmin},{ymin},{xmax},{ymax}) exceeds image bounds {width}x{height}")]
    OutOfBounds {
        xmin: i64,
        ymin: i64,
        xmax: i64,
        ymax: i64,
        width: u32,
        height: u32,
    },
    #[error("box has zero area")]
    EmptyBox,
    #[error("invalid resize target {width}x{height}")]
    InvalidTarget { width: u32, height: u32 },
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("zoom factor {z} outside range [{min}, {max}]")]
    InvalidZoom { z: f64, min: f64, max: f64 },
    #[error("patch {patch_w}x{patch_h} larger than source {src_w}x{src_h}")]
    PatchTooLarge {
        patch_w: u32,
        patch_h: u32,
        src_w: u32,
        src_h: u32,
    },
    #[error("box {box_w}x{box_h} cannot fit inside {width}x{height}")]
    BoxLargerThanBounds {
        box_w: u32,
        box_h: u32,
        width: u32,
        height: u32,
    },
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },
    #[error("IS-A cycle through class `{0}`")]
    Cycle(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("missing source image {0}")]
    MissingSource(PathBuf),
    #[error("no decodable images in {0}")]
    NoInputs(PathBuf),
    #[error("output directory {0} is locked by another process")]
    Locked(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Codec {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

impl Error {
    pub(crate) fn parse(message: impl Into<String>) -> Self {
        Error::Parse {
            line: None,
            message: message.into(),
        }
    }

    pub(crate) fn parse_at(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line: Some(line),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable category name, used when errors cross a language boundary.
    pub fn name(&self) -> &'static str {
        match self {
            Error::OutOfBounds { .. } => "OutOfBounds",
            Error::EmptyBox => "EmptyBox",
            Error::InvalidTarget { .. } => "InvalidTarget",
            Error::InvalidImage(_) => "InvalidImage",
            Error::InvalidZoom { .. } => "InvalidZoom",
            Error::PatchTooLarge { .. } => "PatchTooLarge",
            Error::BoxLargerThanBounds { .. } => "BoxLargerThanBounds",
            Error::Parse { .. } => "ParseError",
            Error::Cycle(_) => "CycleError",
            Error::Config(_) => "ConfigError",
            Error::MissingSource(_) => "MissingSource",
            Error::NoInputs(_) => "NoInputs",
            Error::Locked(_) => "Locked",
            Error::Io { .. } => "IoError",
            Error::Codec { .. } => "CodecError",
        }
    }
}
