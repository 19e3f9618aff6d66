use crate::ingest::Frame;
use crate::scalar::Real;

/// Single-channel float image, row-major, intensities nominally in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Image<T> {
    pub width: usize,
    pub height: usize,
    pub data: Vec<T>,
}

impl<T: Real> Image<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), width * height, "image buffer size");
        Self { width, height, data }
    }

    pub fn from_frame(frame: &Frame) -> Self {
        let scale = T::one() / T::of(255.0);
        Self::new(
            frame.width,
            frame.height,
            frame.pixels.iter().map(|&p| T::of(f64::from(p)) * scale).collect(),
        )
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    #[inline]
    fn clamped(&self, x: isize, y: isize) -> T {
        let xc = x.clamp(0, self.width as isize - 1) as usize;
        let yc = y.clamp(0, self.height as isize - 1) as usize;
        self.at(xc, yc)
    }

    /// Bilinear sample with border clamping.
    pub fn sample(&self, x: T, y: T) -> T {
        let maxx = T::of_usize(self.width - 1);
        let maxy = T::of_usize(self.height - 1);
        let x = x.max(T::zero()).min(maxx);
        let y = y.max(T::zero()).min(maxy);
        // non-negative after clamping, so truncation is floor
        let xi = x.to_usize().unwrap_or(0);
        let yi = y.to_usize().unwrap_or(0);
        let fx = x - T::of_usize(xi);
        let fy = y - T::of_usize(yi);
        let xj = (xi + 1).min(self.width - 1);
        let yj = (yi + 1).min(self.height - 1);
        let (r0, r1) = (yi * self.width, yj * self.width);
        let (a, b) = (self.data[r0 + xi], self.data[r0 + xj]);
        let (c, d) = (self.data[r1 + xi], self.data[r1 + xj]);
        let top = a + (b - a) * fx;
        let bottom = c + (d - c) * fx;
        top + (bottom - top) * fy
    }

    /// Central-difference gradients (one-sided at the border).
    pub fn gradients(&self) -> (Vec<T>, Vec<T>) {
        let (w, h) = (self.width as isize, self.height as isize);
        let half = T::of(0.5);
        let mut gx = Vec::with_capacity(self.data.len());
        let mut gy = Vec::with_capacity(self.data.len());
        for y in 0..h {
            for x in 0..w {
                let dx = if w == 1 {
                    T::zero()
                } else if x == 0 || x == w - 1 {
                    self.clamped(x + 1, y) - self.clamped(x - 1, y)
                } else {
                    (self.clamped(x + 1, y) - self.clamped(x - 1, y)) * half
                };
                let dy = if h == 1 {
                    T::zero()
                } else if y == 0 || y == h - 1 {
                    self.clamped(x, y + 1) - self.clamped(x, y - 1)
                } else {
                    (self.clamped(x, y + 1) - self.clamped(x, y - 1)) * half
                };
                gx.push(dx);
                gy.push(dy);
            }
        }
        (gx, gy)
    }

    /// 5-tap binomial blur followed by 2x decimation.
    pub fn pyr_down(&self) -> Self {
        const K: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];
        let k: Vec<T> = K.iter().map(|&v| T::of(v)).collect();
        let (w, h) = (self.width, self.height);
        let mut tmp = vec![T::zero(); w * h];
        for y in 0..h {
            for x in 0..w {
                tmp[y * w + x] = (0..5)
                    .map(|i| k[i] * self.clamped(x as isize + i as isize - 2, y as isize))
                    .sum();
            }
        }
        let tmp = Image::new(w, h, tmp);
        let (nw, nh) = (w.div_ceil(2), h.div_ceil(2));
        let mut out = Vec::with_capacity(nw * nh);
        for y in 0..nh {
            for x in 0..nw {
                out.push(
                    (0..5)
                        .map(|i| k[i] * tmp.clamped(2 * x as isize, 2 * y as isize + i as isize - 2))
                        .sum(),
                );
            }
        }
        Image::new(nw, nh, out)
    }

    /// Area-averaging resize.
    pub fn resize_area(&self, new_w: usize, new_h: usize) -> Self {
        let wx = area_weights(self.width, new_w);
        let wy = area_weights(self.height, new_h);
        let mut rows = vec![T::zero(); new_w * self.height];
        for y in 0..self.height {
            for (ox, taps) in wx.iter().enumerate() {
                rows[y * new_w + ox] = taps.iter().map(|&(i, wt)| self.at(i, y) * T::of(wt)).sum();
            }
        }
        let mut out = vec![T::zero(); new_w * new_h];
        for (oy, taps) in wy.iter().enumerate() {
            for x in 0..new_w {
                out[oy * new_w + x] = taps.iter().map(|&(i, wt)| rows[i * new_w + x] * T::of(wt)).sum();
            }
        }
        Image::new(new_w, new_h, out)
    }
}

/// For each output cell, the input indices and fractional coverage weights.
fn area_weights(n_in: usize, n_out: usize) -> Vec<Vec<(usize, f64)>> {
    let scale = n_in as f64 / n_out as f64;
    (0..n_out)
        .map(|o| {
            let a = o as f64 * scale;
            let b = (o + 1) as f64 * scale;
            let mut taps = Vec::new();
            let mut i = a.floor() as usize;
            while (i as f64) < b && i < n_in {
                let lo = a.max(i as f64);
                let hi = b.min(i as f64 + 1.0);
                if hi > lo {
                    taps.push((i, (hi - lo) / scale));
                }
                i += 1;
            }
            taps
        })
        .collect()
}
