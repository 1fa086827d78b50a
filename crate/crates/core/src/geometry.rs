//! Rectangle arithmetic: box enlargement, zoom windows, random crop windows
//! and translation jitter.
//!
//! Boxes use 0-based pixel coordinates with exclusive right/bottom edges, so
//! `width = xmax - xmin`. Every real-to-integer conversion rounds half away
//! from zero (`f64::round`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BoundingBox {
    pub xmin: u32,
    pub ymin: u32,
    pub xmax: u32,
    pub ymax: u32,
}

impl BoundingBox {
    /// Builds a box, rejecting zero or negative area.
    pub fn new(xmin: u32, ymin: u32, xmax: u32, ymax: u32) -> Result<Self> {
        let b = BoundingBox {
            xmin,
            ymin,
            xmax,
            ymax,
        };
        if b.is_empty() {
            return Err(Error::EmptyBox);
        }
        Ok(b)
    }

    pub fn full(width: u32, height: u32) -> Self {
        BoundingBox {
            xmin: 0,
            ymin: 0,
            xmax: width,
            ymax: height,
        }
    }

    pub fn width(&self) -> u32 {
        self.xmax.saturating_sub(self.xmin)
    }

    pub fn height(&self) -> u32 {
        self.ymax.saturating_sub(self.ymin)
    }

    pub fn area(&self) -> u64 {
        self.width() as u64 * self.height() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.xmin >= self.xmax || self.ymin >= self.ymax
    }

    pub fn fits_in(&self, width: u32, height: u32) -> bool {
        self.xmax <= width && self.ymax <= height
    }

    /// Shifts the box by `(dx, dy)`, as used when composing a crop of a crop.
    pub fn offset(&self, dx: u32, dy: u32) -> Self {
        BoundingBox {
            xmin: self.xmin + dx,
            ymin: self.ymin + dy,
            xmax: self.xmax + dx,
            ymax: self.ymax + dy,
        }
    }
}

/// Closed interval of admissible zoom factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoomRange {
    pub min: f64,
    pub max: f64,
}

impl ZoomRange {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min < 1.0 || min > max {
            return Err(Error::Config(format!(
                "zoom range [{min}, {max}] must satisfy 1.0 <= min <= max"
            )));
        }
        Ok(ZoomRange { min, max })
    }

    pub fn contains(&self, z: f64) -> bool {
        z >= self.min && z <= self.max
    }
}

impl Default for ZoomRange {
    fn default() -> Self {
        ZoomRange { min: 1.0, max: 2.0 }
    }
}

/// A window drawn for random zooming, together with the factor it realises.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoomWindow {
    pub bbox: BoundingBox,
    pub zoom_factor: f64,
}

/// Real-valued box after growing each side by `factor * side / 2`, before
/// rounding and clamping. Returned as `[xmin, ymin, xmax, ymax]`.
pub fn enlarge_extent(b: &BoundingBox, factor: f64) -> [f64; 4] {
    let gx = factor * b.width() as f64 / 2.0;
    let gy = factor * b.height() as f64 / 2.0;
    [
        b.xmin as f64 - gx,
        b.ymin as f64 - gy,
        b.xmax as f64 + gx,
        b.ymax as f64 + gy,
    ]
}

/// Rounded enlargement without clamping; coordinates may be negative or
/// exceed the image.
pub fn enlarge_unclamped(b: &BoundingBox, factor: f64) -> [i64; 4] {
    enlarge_extent(b, factor).map(|v| v.round() as i64)
}

/// Scales both dimensions by `1 + factor` about the box center, then clamps
/// the result to `[0, bounds_w] x [0, bounds_h]`.
pub fn enlarge_box(b: &BoundingBox, factor: f64, bounds_w: u32, bounds_h: u32) -> Result<BoundingBox> {
    if b.is_empty() {
        return Err(Error::EmptyBox);
    }
    if !(factor >= 0.0 && factor.is_finite()) {
        return Err(Error::Config(format!("enlarge factor {factor} must be >= 0")));
    }
    let [x0, y0, x1, y1] = enlarge_unclamped(b, factor);
    let cx = |v: i64| v.clamp(0, bounds_w as i64) as u32;
    let cy = |v: i64| v.clamp(0, bounds_h as i64) as u32;
    let out = BoundingBox {
        xmin: cx(x0),
        ymin: cy(y0),
        xmax: cx(x1),
        ymax: cy(y1),
    };
    if out.is_empty() {
        // only reachable when the input box lies outside the bounds
        return Err(Error::OutOfBounds {
            xmin: b.xmin as i64,
            ymin: b.ymin as i64,
            xmax: b.xmax as i64,
            ymax: b.ymax as i64,
            width: bounds_w,
            height: bounds_h,
        });
    }
    Ok(out)
}

/// `floor(u * slots)`, kept below `slots` when `u` is within an ulp of 1.
fn pick_offset(u: f64, slots: u32) -> u32 {
    let v = (u * slots as f64).floor();
    if v <= 0.0 {
        0
    } else {
        (v as u32).min(slots - 1)
    }
}

fn check_unit(u: f64) -> Result<()> {
    if (0.0..1.0).contains(&u) {
        Ok(())
    } else {
        Err(Error::Config(format!("position draw {u} outside [0, 1)")))
    }
}

/// Window of size `round(src / z)` placed uniformly over all valid top-left
/// offsets. Aspect ratio of the source is kept.
pub fn zoom_window(
    src_w: u32,
    src_h: u32,
    z: f64,
    range: ZoomRange,
    ux: f64,
    uy: f64,
) -> Result<ZoomWindow> {
    if !z.is_finite() || !range.contains(z) || z < 1.0 {
        return Err(Error::InvalidZoom {
            z,
            min: range.min,
            max: range.max,
        });
    }
    if src_w == 0 || src_h == 0 {
        return Err(Error::EmptyBox);
    }
    check_unit(ux)?;
    check_unit(uy)?;
    let w = ((src_w as f64 / z).round() as u32).clamp(1, src_w);
    let h = ((src_h as f64 / z).round() as u32).clamp(1, src_h);
    let x0 = pick_offset(ux, src_w - w + 1);
    let y0 = pick_offset(uy, src_h - h + 1);
    Ok(ZoomWindow {
        bbox: BoundingBox {
            xmin: x0,
            ymin: y0,
            xmax: x0 + w,
            ymax: y0 + h,
        },
        zoom_factor: z,
    })
}

/// Fixed-size random crop window, e.g. 227x227 out of 256x256.
pub fn crop_window(
    src_w: u32,
    src_h: u32,
    out_w: u32,
    out_h: u32,
    ux: f64,
    uy: f64,
) -> Result<BoundingBox> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::EmptyBox);
    }
    if out_w > src_w || out_h > src_h {
        return Err(Error::PatchTooLarge {
            patch_w: out_w,
            patch_h: out_h,
            src_w,
            src_h,
        });
    }
    check_unit(ux)?;
    check_unit(uy)?;
    let x0 = pick_offset(ux, src_w - out_w + 1);
    let y0 = pick_offset(uy, src_h - out_h + 1);
    Ok(BoundingBox {
        xmin: x0,
        ymin: y0,
        xmax: x0 + out_w,
        ymax: y0 + out_h,
    })
}

/// Shifts the box by `round(u * fraction * side)` on each axis, then slides
/// it back inside the bounds. Dimensions are preserved exactly.
pub fn translate_box(
    b: &BoundingBox,
    fraction: f64,
    bounds_w: u32,
    bounds_h: u32,
    ux: f64,
    uy: f64,
) -> Result<BoundingBox> {
    if b.is_empty() {
        return Err(Error::EmptyBox);
    }
    if !(fraction >= 0.0 && fraction.is_finite()) {
        return Err(Error::Config(format!("translation fraction {fraction} must be >= 0")));
    }
    if !((-1.0..=1.0).contains(&ux) && (-1.0..=1.0).contains(&uy)) {
        return Err(Error::Config(format!("translation draws ({ux}, {uy}) outside [-1, 1]")));
    }
    let (w, h) = (b.width(), b.height());
    if w > bounds_w || h > bounds_h {
        return Err(Error::BoxLargerThanBounds {
            box_w: w,
            box_h: h,
            width: bounds_w,
            height: bounds_h,
        });
    }
    let dx = (ux * fraction * w as f64).round() as i64;
    let dy = (uy * fraction * h as f64).round() as i64;
    let x0 = (b.xmin as i64 + dx).clamp(0, (bounds_w - w) as i64) as u32;
    let y0 = (b.ymin as i64 + dy).clamp(0, (bounds_h - h) as i64) as u32;
    Ok(BoundingBox {
        xmin: x0,
        ymin: y0,
        xmax: x0 + w,
        ymax: y0 + h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bx(a: u32, b: u32, c: u32, d: u32) -> BoundingBox {
        BoundingBox::new(a, b, c, d).unwrap()
    }

    #[test]
    fn enlarge_interior_box() {
        assert_eq!(enlarge_box(&bx(10, 10, 30, 30), 0.2, 100, 100).unwrap(), bx(8, 8, 32, 32));
    }

    #[test]
    fn enlarge_clamps_at_origin() {
        assert_eq!(enlarge_box(&bx(0, 0, 20, 20), 0.2, 100, 100).unwrap(), bx(0, 0, 22, 22));
    }

    #[test]
    fn enlarge_zero_factor_is_identity() {
        let b = bx(3, 7, 41, 12);
        assert_eq!(enlarge_box(&b, 0.0, 50, 50).unwrap(), b);
    }

    #[test]
    fn enlarge_rejects_empty() {
        let b = BoundingBox {
            xmin: 5,
            ymin: 5,
            xmax: 5,
            ymax: 9,
        };
        assert!(matches!(enlarge_box(&b, 0.2, 10, 10), Err(Error::EmptyBox)));
    }

    #[test]
    fn zoom_half_size() {
        let r = ZoomRange::default();
        let w = zoom_window(100, 100, 2.0, r, 0.0, 0.0).unwrap();
        assert_eq!((w.bbox.width(), w.bbox.height()), (50, 50));
        let w = zoom_window(100, 100, 2.0, r, 0.999_999, 0.999_999).unwrap();
        assert_eq!((w.bbox.xmin, w.bbox.ymin), (50, 50));
    }

    #[test]
    fn zoom_one_is_full_frame() {
        let w = zoom_window(37, 21, 1.0, ZoomRange::default(), 0.73, 0.12).unwrap();
        assert_eq!(w.bbox, BoundingBox::full(37, 21));
    }

    #[test]
    fn zoom_non_square() {
        let w = zoom_window(640, 480, 1.5, ZoomRange::default(), 0.5, 0.5).unwrap();
        assert_eq!((w.bbox.width(), w.bbox.height()), (427, 320));
    }

    #[test]
    fn zoom_out_of_range() {
        let r = ZoomRange::default();
        assert!(matches!(zoom_window(10, 10, 2.5, r, 0.0, 0.0), Err(Error::InvalidZoom { .. })));
        assert!(matches!(zoom_window(10, 10, 0.5, r, 0.0, 0.0), Err(Error::InvalidZoom { .. })));
    }

    #[test]
    fn crop_window_alexnet_geometry() {
        let hi = 1.0 - f64::EPSILON;
        assert_eq!(crop_window(256, 256, 227, 227, 0.0, 0.0).unwrap().xmin, 0);
        assert_eq!(crop_window(256, 256, 227, 227, hi, hi).unwrap().xmin, 29);
        assert_eq!(crop_window(384, 384, 299, 299, hi, hi).unwrap().ymin, 85);
        assert_eq!(crop_window(9, 4, 9, 4, 0.6, 0.6).unwrap(), BoundingBox::full(9, 4));
        assert!(matches!(crop_window(8, 8, 9, 4, 0.0, 0.0), Err(Error::PatchTooLarge { .. })));
    }

    #[test]
    fn crop_window_is_surjective() {
        let (src, out) = (12u32, 7u32);
        let mut seen = std::collections::HashSet::new();
        let steps = 200;
        for i in 0..steps {
            for j in 0..steps {
                let b = crop_window(src, src, out, out, i as f64 / steps as f64, j as f64 / steps as f64)
                    .unwrap();
                seen.insert((b.xmin, b.ymin));
            }
        }
        assert_eq!(seen.len(), ((src - out + 1) * (src - out + 1)) as usize);
    }

    #[test]
    fn translate_identity_and_clamp() {
        let b = bx(40, 40, 60, 60);
        assert_eq!(translate_box(&b, 0.0, 100, 100, 0.8, -0.3).unwrap(), b);
        let t = translate_box(&b, 0.3, 100, 100, 1.0, -1.0).unwrap();
        assert_eq!((t.xmin, t.ymin), (46, 34));
        let flush = bx(80, 10, 100, 30);
        let t = translate_box(&flush, 0.3, 100, 100, 1.0, 0.0).unwrap();
        assert_eq!(t, flush);
        let full = BoundingBox::full(50, 40);
        assert_eq!(translate_box(&full, 0.3, 50, 40, -0.9, 0.9).unwrap(), full);
        assert!(matches!(
            translate_box(&bx(0, 0, 60, 10), 0.1, 50, 50, 0.0, 0.0),
            Err(Error::BoxLargerThanBounds { .. })
        ));
    }

    proptest! {
        #[test]
        fn enlarge_area_ratio(x in 0u32..400, y in 0u32..400, w in 1u32..300, h in 1u32..300, f in 0.0f64..1.0) {
            let b = bx(x, y, x + w, y + h);
            let [x0, y0, x1, y1] = enlarge_extent(&b, f);
            let ratio = (x1 - x0) * (y1 - y0) / b.area() as f64;
            prop_assert!((ratio - (1.0 + f).powi(2)).abs() < 1e-9);
            let bound = 2000;
            let e = enlarge_box(&b, f, bound, bound).unwrap();
            let interior = x0 >= 0.5 && y0 >= 0.5 && x1 <= bound as f64 && y1 <= bound as f64;
            if interior {
                let r = e.area() as f64 / b.area() as f64;
                let tol = (2.0 * (w + h) as f64 + 4.0) / (w as f64 * h as f64);
                prop_assert!((r - (1.0 + f).powi(2)).abs() <= tol);
            }
            prop_assert!(e.fits_in(bound, bound));
        }

        #[test]
        fn zoom_window_contained(w in 1u32..3000, h in 1u32..3000, z in 1.0f64..=2.0, ux in 0.0f64..1.0, uy in 0.0f64..1.0) {
            let win = zoom_window(w, h, z, ZoomRange::default(), ux, uy).unwrap();
            prop_assert!(!win.bbox.is_empty());
            prop_assert!(win.bbox.fits_in(w, h));
        }

        #[test]
        fn translate_preserves_size(x in 0u32..100, y in 0u32..100, w in 1u32..100, h in 1u32..100,
                                    f in 0.0f64..1.0, ux in -1.0f64..=1.0, uy in -1.0f64..=1.0) {
            let b = bx(x, y, x + w, y + h);
            let t = translate_box(&b, f, 200, 200, ux, uy).unwrap();
            prop_assert_eq!((t.width(), t.height()), (w, h));
            prop_assert!(t.fits_in(200, 200));
        }
    }
}
