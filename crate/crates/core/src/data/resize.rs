use super::GrayImage;
use crate::error::{Error, Result};

/// Bilinear resampling with pixel-center alignment and edge clamping.
///
/// Output pixel `i` samples source coordinate `(i + 0.5) * src / dst - 0.5`.
pub fn resize_bilinear(image: &GrayImage, out_height: usize, out_width: usize) -> Result<GrayImage> {
    if image.pixels.is_empty() || image.width == 0 || image.height == 0 {
        return Err(Error::InvalidArgument("cannot resize an empty image".into()));
    }
    if out_height == 0 || out_width == 0 {
        return Err(Error::InvalidArgument("target size must be positive".into()));
    }
    let rows: Vec<(usize, usize, f64)> = (0..out_height)
        .map(|i| sample_axis(i, image.height, out_height))
        .collect();
    let cols: Vec<(usize, usize, f64)> = (0..out_width)
        .map(|j| sample_axis(j, image.width, out_width))
        .collect();
    let mut pixels = Vec::with_capacity(out_height * out_width);
    for &(y0, y1, fy) in &rows {
        for &(x0, x1, fx) in &cols {
            let p00 = image.at(y0, x0) as f64;
            let p01 = image.at(y0, x1) as f64;
            let p10 = image.at(y1, x0) as f64;
            let p11 = image.at(y1, x1) as f64;
            let top = p00 + fx * (p01 - p00);
            let bottom = p10 + fx * (p11 - p10);
            let v = top + fy * (bottom - top);
            let lo = p00.min(p01).min(p10).min(p11);
            let hi = p00.max(p01).max(p10).max(p11);
            pixels.push(v.clamp(lo, hi) as f32);
        }
    }
    GrayImage::new(out_width, out_height, pixels)
}

/// Neighbouring source indices and the fractional weight of the second one.
fn sample_axis(i: usize, src: usize, dst: usize) -> (usize, usize, f64) {
    let s = ((i as f64 + 0.5) * src as f64 / dst as f64 - 0.5).clamp(0.0, (src - 1) as f64);
    let lo = s.floor() as usize;
    let hi = (lo + 1).min(src - 1);
    (lo, hi, s - lo as f64)
}
