//! Owned 8-bit raster and the pixel kernels: crop, horizontal flip and
//! bilinear resize.

use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;

/// Row-major, interleaved 8-bit image with 1 (gray) or 3 (RGB) channels.
#[derive(Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: u32,
    height: u32,
    channels: u8,
    data: Vec<u8>,
}

impl std::fmt::Debug for ImageBuffer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ImageBuffer")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("channels", &self.channels)
            .finish_non_exhaustive()
    }
}

impl ImageBuffer {
    pub fn from_raw(width: u32, height: u32, channels: u8, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!("zero dimension {width}x{height}")));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidImage(format!("unsupported channel count {channels}")));
        }
        let expected = width as usize * height as usize * channels as usize;
        if data.len() != expected {
            return Err(Error::InvalidImage(format!(
                "buffer holds {} bytes, {width}x{height}x{channels} needs {expected}",
                data.len()
            )));
        }
        Ok(ImageBuffer {
            width,
            height,
            channels,
            data,
        })
    }

    /// Image with every sample set to `value`.
    pub fn filled(width: u32, height: u32, channels: u8, value: u8) -> Result<Self> {
        let len = width as usize * height as usize * channels as usize;
        Self::from_raw(width, height, channels, vec![value; len])
    }

    pub fn from_fn(
        width: u32,
        height: u32,
        channels: u8,
        mut f: impl FnMut(u32, u32, u8) -> u8,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width as usize * height as usize * channels as usize);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(f(x, y, c));
                }
            }
        }
        Self::from_raw(width, height, channels, data)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn dimensions(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn pixel(&self, x: u32, y: u32) -> &[u8] {
        let c = self.channels as usize;
        let i = (y as usize * self.width as usize + x as usize) * c;
        &self.data[i..i + c]
    }

    fn row(&self, y: u32) -> &[u8] {
        let stride = self.width as usize * self.channels as usize;
        let start = y as usize * stride;
        &self.data[start..start + stride]
    }

    /// Smallest and largest sample over all channels.
    pub fn sample_range(&self) -> (u8, u8) {
        self.data
            .iter()
            .fold((u8::MAX, u8::MIN), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Decodes a PNG or JPEG file. Gray inputs stay single-channel; anything
    /// else is converted to RGB.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let decoded = image::open(path).map_err(|source| match source {
            image::ImageError::IoError(e) => Error::io(path, e),
            source => Error::Codec {
                path: path.to_path_buf(),
                source,
            },
        })?;
        Self::from_dynamic(decoded)
    }

    pub fn from_dynamic(img: image::DynamicImage) -> Result<Self> {
        use image::DynamicImage;
        match img {
            DynamicImage::ImageLuma8(g) => {
                let (w, h) = g.dimensions();
                Self::from_raw(w, h, 1, g.into_raw())
            }
            other => {
                let rgb = other.into_rgb8();
                let (w, h) = rgb.dimensions();
                Self::from_raw(w, h, 3, rgb.into_raw())
            }
        }
    }

    /// Encodes as PNG (8-bit gray or RGB).
    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let color = if self.channels == 1 {
            image::ExtendedColorType::L8
        } else {
            image::ExtendedColorType::Rgb8
        };
        image::save_buffer_with_format(
            path,
            &self.data,
            self.width,
            self.height,
            color,
            image::ImageFormat::Png,
        )
        .map_err(|source| match source {
            image::ImageError::IoError(e) => Error::io(path, e),
            source => Error::Codec {
                path: path.to_path_buf(),
                source,
            },
        })
    }
}

/// Copies the pixels inside `bbox`.
pub fn crop(img: &ImageBuffer, bbox: &BoundingBox) -> Result<ImageBuffer> {
    if bbox.is_empty() {
        return Err(Error::EmptyBox);
    }
    if !bbox.fits_in(img.width, img.height) {
        return Err(Error::OutOfBounds {
            xmin: bbox.xmin as i64,
            ymin: bbox.ymin as i64,
            xmax: bbox.xmax as i64,
            ymax: bbox.ymax as i64,
            width: img.width,
            height: img.height,
        });
    }
    let c = img.channels as usize;
    let (x0, x1) = (bbox.xmin as usize * c, bbox.xmax as usize * c);
    let mut data = Vec::with_capacity(bbox.area() as usize * c);
    for y in bbox.ymin..bbox.ymax {
        data.extend_from_slice(&img.row(y)[x0..x1]);
    }
    ImageBuffer::from_raw(bbox.width(), bbox.height(), img.channels, data)
}

pub fn hflip(img: &ImageBuffer) -> ImageBuffer {
    let c = img.channels as usize;
    let mut data = Vec::with_capacity(img.data.len());
    for y in 0..img.height {
        for px in img.row(y).chunks_exact(c).rev() {
            data.extend_from_slice(px);
        }
    }
    ImageBuffer { data, ..*img }
}

/// Source taps for one output coordinate along an axis.
#[derive(Clone, Copy)]
struct Tap {
    lo: usize,
    hi: usize,
    frac: f64,
}

/// Half-pixel-center mapping with the source coordinate clamped to
/// `[0, src - 1]`.
fn axis_taps(src: u32, dst: u32) -> Vec<Tap> {
    let scale = src as f64 / dst as f64;
    let last = (src - 1) as f64;
    (0..dst)
        .map(|t| {
            let s = ((t as f64 + 0.5) * scale - 0.5).clamp(0.0, last);
            let lo = s.floor();
            Tap {
                lo: lo as usize,
                hi: (lo as usize + 1).min(src as usize - 1),
                frac: s - lo,
            }
        })
        .collect()
}

/// Bilinear resampling to `target_w x target_h`.
///
/// Each sample is blended in `f64` as
/// `(1-fy)((1-fx)p00 + fx p10) + fy((1-fx)p01 + fx p11)` and rounded half
/// away from zero, so the output is reproducible byte for byte. Aspect ratio
/// is not preserved.
pub fn bilinear_resize(img: &ImageBuffer, target_w: u32, target_h: u32) -> Result<ImageBuffer> {
    if target_w == 0 || target_h == 0 {
        return Err(Error::InvalidTarget {
            width: target_w,
            height: target_h,
        });
    }
    if (target_w, target_h) == img.dimensions() {
        return Ok(img.clone());
    }
    let c = img.channels as usize;
    let xs = axis_taps(img.width, target_w);
    let ys = axis_taps(img.height, target_h);
    let mut data = Vec::with_capacity(target_w as usize * target_h as usize * c);
    for ty in &ys {
        let top = img.row(ty.lo as u32);
        let bottom = img.row(ty.hi as u32);
        let fy = ty.frac;
        for tx in &xs {
            let fx = tx.frac;
            let (l, r) = (tx.lo * c, tx.hi * c);
            for ch in 0..c {
                let p00 = top[l + ch] as f64;
                let p10 = top[r + ch] as f64;
                let p01 = bottom[l + ch] as f64;
                let p11 = bottom[r + ch] as f64;
                let v = (1.0 - fy) * ((1.0 - fx) * p00 + fx * p10) + fy * ((1.0 - fx) * p01 + fx * p11);
                data.push(v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    ImageBuffer::from_raw(target_w, target_h, img.channels, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gray(w: u32, h: u32, px: &[u8]) -> ImageBuffer {
        ImageBuffer::from_raw(w, h, 1, px.to_vec()).unwrap()
    }

    fn ramp(w: u32, h: u32) -> ImageBuffer {
        ImageBuffer::from_fn(w, h, 1, |x, y, _| (y * w + x) as u8).unwrap()
    }

    #[test]
    fn rejects_bad_buffers() {
        assert!(ImageBuffer::from_raw(0, 3, 1, vec![]).is_err());
        assert!(ImageBuffer::from_raw(2, 2, 2, vec![0; 8]).is_err());
        assert!(ImageBuffer::from_raw(2, 2, 3, vec![0; 11]).is_err());
    }

    #[test]
    fn crop_full_is_identity() {
        let img = ramp(4, 4);
        assert_eq!(crop(&img, &BoundingBox::full(4, 4)).unwrap(), img);
    }

    #[test]
    fn crop_inner() {
        let img = ramp(4, 4);
        let c = crop(&img, &BoundingBox::new(1, 1, 3, 3).unwrap()).unwrap();
        assert_eq!(c.as_bytes(), &[5, 6, 9, 10]);
    }

    #[test]
    fn crop_errors() {
        let img = ramp(4, 4);
        assert!(matches!(
            crop(&img, &BoundingBox::full(5, 5)),
            Err(Error::OutOfBounds { .. })
        ));
        let empty = BoundingBox {
            xmin: 2,
            ymin: 0,
            xmax: 2,
            ymax: 3,
        };
        assert!(matches!(crop(&img, &empty), Err(Error::EmptyBox)));
    }

    #[test]
    fn hflip_basics() {
        assert_eq!(hflip(&gray(2, 1, &[3, 9])).as_bytes(), &[9, 3]);
        let column = gray(1, 3, &[1, 2, 3]);
        assert_eq!(hflip(&column), column);
        let rgb = ImageBuffer::from_raw(2, 1, 3, vec![1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(hflip(&rgb).as_bytes(), &[4, 5, 6, 1, 2, 3]);
    }

    #[test]
    fn resize_examples() {
        let img = gray(2, 2, &[0, 0, 100, 100]);
        assert_eq!(bilinear_resize(&img, 1, 1).unwrap().as_bytes(), &[50]);
        let one = gray(1, 1, &[7]);
        assert_eq!(bilinear_resize(&one, 3, 3).unwrap().as_bytes(), &[7; 9]);
        let r = ramp(5, 3);
        assert_eq!(bilinear_resize(&r, 5, 3).unwrap(), r);
        assert!(matches!(bilinear_resize(&r, 0, 3), Err(Error::InvalidTarget { .. })));
    }

    fn arb_image() -> impl Strategy<Value = ImageBuffer> {
        (1u32..10, 1u32..10, prop::bool::ANY).prop_flat_map(|(w, h, rgb)| {
            let c = if rgb { 3 } else { 1 };
            prop::collection::vec(any::<u8>(), (w * h * c as u32) as usize)
                .prop_map(move |d| ImageBuffer::from_raw(w, h, c, d).unwrap())
        })
    }

    fn histogram(img: &ImageBuffer) -> Vec<[usize; 256]> {
        let c = img.channels() as usize;
        let mut h = vec![[0usize; 256]; c];
        for (i, &v) in img.as_bytes().iter().enumerate() {
            h[i % c][v as usize] += 1;
        }
        h
    }

    proptest! {
        #[test]
        fn hflip_involution(img in arb_image()) {
            let f = hflip(&img);
            prop_assert_eq!(histogram(&f), histogram(&img));
            prop_assert_eq!(hflip(&f), img);
        }

        #[test]
        fn crop_composes(img in arb_image(), a in any::<[u8; 4]>(), b in any::<[u8; 4]>()) {
            let (w, h) = img.dimensions();
            let pick = |v: [u8; 4], w: u32, h: u32| {
                let x0 = v[0] as u32 % w;
                let y0 = v[1] as u32 % h;
                let x1 = x0 + 1 + v[2] as u32 % (w - x0);
                let y1 = y0 + 1 + v[3] as u32 % (h - y0);
                BoundingBox::new(x0, y0, x1, y1).unwrap()
            };
            let outer = pick(a, w, h);
            let inner = pick(b, outer.width(), outer.height());
            let twice = crop(&crop(&img, &outer).unwrap(), &inner).unwrap();
            prop_assert_eq!(twice, crop(&img, &inner.offset(outer.xmin, outer.ymin)).unwrap());
        }

        #[test]
        fn resize_stays_in_range(img in arb_image(), tw in 1u32..20, th in 1u32..20) {
            let (lo, hi) = img.sample_range();
            let out = bilinear_resize(&img, tw, th).unwrap();
            prop_assert_eq!(out.dimensions(), (tw, th));
            prop_assert!(out.as_bytes().iter().all(|&v| v >= lo && v <= hi));
        }

        #[test]
        fn resize_constant(w in 1u32..12, h in 1u32..12, v in any::<u8>(), tw in 1u32..24, th in 1u32..24) {
            let img = ImageBuffer::filled(w, h, 3, v).unwrap();
            let out = bilinear_resize(&img, tw, th).unwrap();
            prop_assert!(out.as_bytes().iter().all(|&s| s == v));
        }
    }
}
