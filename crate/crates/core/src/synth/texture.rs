use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::flow::Image;
use crate::ingest::Frame;

/// Periodic band-limited random texture, mean 0.5 and sd 0.15, clamped to [0, 1].
///
/// Spatial wavelengths lie in `[min_wavelength, max_wavelength]` pixels, so the
/// image tiles seamlessly and sub-pixel shifts stay well resolved.
pub fn fourier_texture<R: Rng>(
    width: usize,
    height: usize,
    min_wavelength: f64,
    max_wavelength: f64,
    rng: &mut R,
) -> Image<f64> {
    let mut spec = vec![Complex::new(0.0, 0.0); width * height];
    for ky in 0..height {
        let fy = signed_freq(ky, height) / height as f64;
        for kx in 0..width {
            let fx = signed_freq(kx, width) / width as f64;
            let f = fx.hypot(fy);
            // draw for every cell so the stream does not depend on the band
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            if f > 0.0 && f >= 1.0 / max_wavelength && f <= 1.0 / min_wavelength {
                spec[ky * width + kx] = Complex::new(re, im);
            }
        }
    }
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = planner.plan_fft_inverse(width);
    for row in spec.chunks_exact_mut(width) {
        row_fft.process(row);
    }
    let col_fft = planner.plan_fft_inverse(height);
    let mut col = vec![Complex::new(0.0, 0.0); height];
    for x in 0..width {
        for y in 0..height {
            col[y] = spec[y * width + x];
        }
        col_fft.process(&mut col);
        for y in 0..height {
            spec[y * width + x] = col[y];
        }
    }
    let vals: Vec<f64> = spec.iter().map(|c| c.re).collect();
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let scale = if sd > 0.0 { 0.15 / sd } else { 0.0 };
    Image::new(
        width,
        height,
        vals.iter()
            .map(|v| (0.5 + (v - mean) * scale).clamp(0.0, 1.0))
            .collect(),
    )
}

fn signed_freq(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Bilinear sample with periodic wrap.
pub fn sample_wrap(img: &Image<f64>, x: f64, y: f64) -> f64 {
    let (w, h) = (img.width as f64, img.height as f64);
    let x = x.rem_euclid(w);
    let y = y.rem_euclid(h);
    let (x0, y0) = (x.floor(), y.floor());
    let (fx, fy) = (x - x0, y - y0);
    let xi = x0 as usize % img.width;
    let yi = y0 as usize % img.height;
    let xj = (xi + 1) % img.width;
    let yj = (yi + 1) % img.height;
    let top = img.at(xi, yi) * (1.0 - fx) + img.at(xj, yi) * fx;
    let bottom = img.at(xi, yj) * (1.0 - fx) + img.at(xj, yj) * fx;
    top * (1.0 - fy) + bottom * fy
}

/// Content moved by `(dx, dy)` pixels with wrap-around: `out(x, y) = img(x - dx, y - dy)`.
pub fn shift_wrap(img: &Image<f64>, dx: isize, dy: isize) -> Image<f64> {
    let (w, h) = (img.width as isize, img.height as isize);
    let mut out = Vec::with_capacity(img.data.len());
    for y in 0..h {
        for x in 0..w {
            out.push(img.at((x - dx).rem_euclid(w) as usize, (y - dy).rem_euclid(h) as usize));
        }
    }
    Image::new(img.width, img.height, out)
}

/// A `width x height` view of a periodic texture displaced by `(dx, dy)`.
pub fn render_shifted(tex: &Image<f64>, width: usize, height: usize, dx: f64, dy: f64) -> Image<f64> {
    let mut out = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            out.push(sample_wrap(tex, x as f64 - dx, y as f64 - dy));
        }
    }
    Image::new(width, height, out)
}

/// Quantizes intensities in [0, 1] to an 8-bit frame.
pub fn to_frame(img: &Image<f64>) -> Frame {
    let pixels = img
        .data
        .iter()
        .map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    Frame::new(img.width, img.height, pixels).expect("buffer matches dimensions")
}
