use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::image::Image;
use super::FlowError;
use crate::scalar::Real;

/// Parameters of the pyramidal inverse-search flow estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DisParams {
    pub pyramid_levels: usize,
    pub patch_size: usize,
    pub patch_stride: usize,
    pub iterations: usize,
    /// Mean squared gradient per pixel below which a patch is left at its initial flow.
    pub texture_floor: f64,
    /// Frames taller than this are area-downscaled before estimation; 0 keeps full size.
    pub working_height: usize,
}

impl Default for DisParams {
    fn default() -> Self {
        Self {
            pyramid_levels: 3,
            patch_size: 8,
            patch_stride: 4,
            iterations: 12,
            texture_floor: 1e-6,
            working_height: 360,
        }
    }
}

impl DisParams {
    pub fn validate(&self) -> Result<(), FlowError> {
        if self.pyramid_levels < 1 {
            return Err(FlowError::InvalidParams("pyramid levels must be >= 1".into()));
        }
        if self.patch_size < 4 {
            return Err(FlowError::InvalidParams("patch size must be >= 4".into()));
        }
        if self.patch_stride < 1 || self.patch_stride > self.patch_size {
            return Err(FlowError::InvalidParams(format!(
                "patch stride {} outside 1..={}",
                self.patch_stride, self.patch_size
            )));
        }
        Ok(())
    }
}

/// Per-pixel displacement field at working resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField<T> {
    pub width: usize,
    pub height: usize,
    pub dx: Vec<T>,
    pub dy: Vec<T>,
}

impl<T: Real> FlowField<T> {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            dx: vec![T::zero(); width * height],
            dy: vec![T::zero(); width * height],
        }
    }

    pub fn uniform(width: usize, height: usize, dx: T, dy: T) -> Self {
        Self {
            width,
            height,
            dx: vec![dx; width * height],
            dy: vec![dy; width * height],
        }
    }

    /// Upsample to `(w, h)` with displacements scaled by 2.
    fn upsample(&self, w: usize, h: usize) -> Self {
        let gx = Image::new(self.width, self.height, self.dx.clone());
        let gy = Image::new(self.width, self.height, self.dy.clone());
        let two = T::of(2.0);
        let half = T::of(0.5);
        let mut out = Self::zeros(w, h);
        for y in 0..h {
            for x in 0..w {
                let (sx, sy) = (T::of_usize(x) * half, T::of_usize(y) * half);
                out.dx[y * w + x] = gx.sample(sx, sy) * two;
                out.dy[y * w + x] = gy.sample(sx, sy) * two;
            }
        }
        out
    }
}

/// Mean per-pixel flow magnitude.
pub fn motion_magnitude<T: Real>(field: &FlowField<T>) -> T {
    if field.dx.is_empty() {
        return T::zero();
    }
    field
        .dx
        .iter()
        .zip(&field.dy)
        .map(|(&u, &v)| (u * u + v * v).sqrt())
        .sum::<T>()
        / T::of_usize(field.dx.len())
}

/// Patch origins along one axis: regular stride plus one flush with the far edge.
fn patch_origins(extent: usize, patch: usize, stride: usize) -> Vec<usize> {
    let last = extent - patch;
    let mut v: Vec<usize> = (0..=last).step_by(stride).collect();
    if *v.last().unwrap() != last {
        v.push(last);
    }
    v
}

struct Level<'a, T> {
    prev: &'a Image<T>,
    next: &'a Image<T>,
    gx: &'a [T],
    gy: &'a [T],
}

/// Inverse-compositional translation search for one patch.
fn refine_patch<T: Real>(lv: &Level<'_, T>, x0: usize, y0: usize, init: (T, T), p: &DisParams) -> (T, T) {
    let ps = p.patch_size;
    let n = T::of_usize(ps * ps);
    let w = lv.prev.width;
    let mut tmpl = Vec::with_capacity(ps * ps);
    let mut jx = Vec::with_capacity(ps * ps);
    let mut jy = Vec::with_capacity(ps * ps);
    for y in y0..y0 + ps {
        for x in x0..x0 + ps {
            tmpl.push(lv.prev.at(x, y));
            jx.push(lv.gx[y * w + x]);
            jy.push(lv.gy[y * w + x]);
        }
    }
    let energy = jx.iter().zip(&jy).map(|(&a, &b)| a * a + b * b).sum::<T>() / n;
    if energy < T::of(p.texture_floor) {
        return init;
    }
    // zero-mean normalization removes brightness offsets between the two frames
    let tmean = tmpl.iter().copied().sum::<T>() / n;
    let jxm = jx.iter().copied().sum::<T>() / n;
    let jym = jy.iter().copied().sum::<T>() / n;
    for i in 0..tmpl.len() {
        tmpl[i] = tmpl[i] - tmean;
        jx[i] = jx[i] - jxm;
        jy[i] = jy[i] - jym;
    }
    let (mut hxx, mut hxy, mut hyy) = (T::zero(), T::zero(), T::zero());
    for i in 0..jx.len() {
        hxx = hxx + jx[i] * jx[i];
        hxy = hxy + jx[i] * jy[i];
        hyy = hyy + jy[i] * jy[i];
    }
    let det = hxx * hyy - hxy * hxy;
    if !(det > T::of(1e-12) * (hxx + hyy) * (hxx + hyy)) || !(det > T::zero()) {
        return init;
    }
    let (mut u, mut v) = init;
    let mut warped = vec![T::zero(); ps * ps];
    let mut init_cost = None;
    for _ in 0..p.iterations {
        let cost = residual(lv, x0, y0, ps, u, v, &tmpl, &mut warped);
        init_cost.get_or_insert(cost);
        let (mut bx, mut by) = (T::zero(), T::zero());
        for i in 0..warped.len() {
            bx = bx + jx[i] * warped[i];
            by = by + jy[i] * warped[i];
        }
        let du = (hyy * bx - hxy * by) / det;
        let dv = (hxx * by - hxy * bx) / det;
        u = u - du;
        v = v - dv;
        if du.abs() + dv.abs() < T::of(1e-4) {
            break;
        }
    }
    let lim = T::of_usize(ps);
    if !(u.is_finite() && v.is_finite()) || (u - init.0).hypot(v - init.1) > lim {
        return init;
    }
    // keep the search result only if it actually fits better than the initial guess
    if let Some(c0) = init_cost {
        if residual(lv, x0, y0, ps, u, v, &tmpl, &mut warped) > c0 {
            return init;
        }
    }
    (u, v)
}

/// Fills `err` with the zero-mean residual of `next` warped by `(u, v)`
/// against the zero-mean template and returns its sum of squares.
#[allow(clippy::too_many_arguments)]
fn residual<T: Real>(lv: &Level<'_, T>, x0: usize, y0: usize, ps: usize, u: T, v: T, tmpl: &[T], err: &mut [T]) -> T {
    for (row, vals) in err.chunks_mut(ps).enumerate() {
        let sy = T::of_usize(y0 + row) + v;
        for (col, val) in vals.iter_mut().enumerate() {
            *val = lv.next.sample(T::of_usize(x0 + col) + u, sy);
        }
    }
    let mean = err.iter().copied().sum::<T>() / T::of_usize(err.len());
    let mut ss = T::zero();
    for (e, &t) in err.iter_mut().zip(tmpl) {
        *e = *e - mean - t;
        ss = ss + *e * *e;
    }
    ss
}

/// Inverse-distance weighted average of the patch displacements covering each pixel.
fn densify<T: Real>(w: usize, h: usize, ps: usize, patches: &[(usize, usize, T, T)]) -> FlowField<T> {
    let mut sx = vec![T::zero(); w * h];
    let mut sy = vec![T::zero(); w * h];
    let mut sw = vec![T::zero(); w * h];
    // weights depend only on the offset inside the patch
    let half = T::of_usize(ps - 1) * T::of(0.5);
    let floor = T::of(1e-3);
    let weights: Vec<T> = (0..ps * ps)
        .map(|i| {
            let (dx, dy) = (T::of_usize(i % ps) - half, T::of_usize(i / ps) - half);
            T::one() / dx.hypot(dy).max(floor)
        })
        .collect();
    for &(x0, y0, u, v) in patches {
        for (row, wts) in weights.chunks(ps).enumerate() {
            let base = (y0 + row) * w + x0;
            for (k, &wt) in wts.iter().enumerate() {
                let i = base + k;
                sx[i] = sx[i] + wt * u;
                sy[i] = sy[i] + wt * v;
                sw[i] = sw[i] + wt;
            }
        }
    }
    let mut out = FlowField::zeros(w, h);
    for i in 0..w * h {
        if sw[i] > T::zero() {
            out.dx[i] = sx[i] / sw[i];
            out.dy[i] = sy[i] / sw[i];
        }
    }
    out
}

fn working_image<T: Real>(img: &Image<T>, target_h: usize) -> Image<T> {
    if target_h == 0 || img.height <= target_h {
        return img.clone();
    }
    let new_w = ((img.width as f64) * target_h as f64 / img.height as f64)
        .round()
        .max(1.0) as usize;
    img.resize_area(new_w, target_h)
}

/// Coarse-to-fine dense flow from `prev` to `next`.
pub fn dense_flow<T: Real>(prev: &Image<T>, next: &Image<T>, params: &DisParams) -> Result<FlowField<T>, FlowError> {
    params.validate()?;
    if prev.width != next.width || prev.height != next.height {
        return Err(FlowError::DimensionMismatch {
            prev: (prev.width, prev.height),
            next: (next.width, next.height),
        });
    }
    let prev = working_image(prev, params.working_height);
    let next = working_image(next, params.working_height);
    let mut pyr_prev = vec![prev];
    let mut pyr_next = vec![next];
    for _ in 1..params.pyramid_levels {
        let a = pyr_prev.last().unwrap().pyr_down();
        let b = pyr_next.last().unwrap().pyr_down();
        pyr_prev.push(a);
        pyr_next.push(b);
    }
    let coarsest = pyr_prev.last().unwrap();
    if coarsest.width < params.patch_size || coarsest.height < params.patch_size {
        return Err(FlowError::FrameTooSmall {
            width: coarsest.width,
            height: coarsest.height,
            patch: params.patch_size,
        });
    }

    let mut flow: Option<FlowField<T>> = None;
    for level in (0..params.pyramid_levels).rev() {
        let (a, b) = (&pyr_prev[level], &pyr_next[level]);
        let (w, h) = (a.width, a.height);
        let init = match flow.take() {
            Some(f) => f.upsample(w, h),
            None => FlowField::zeros(w, h),
        };
        let init_x = Image::new(w, h, init.dx);
        let init_y = Image::new(w, h, init.dy);
        let (gx, gy) = a.gradients();
        let lv = Level {
            prev: a,
            next: b,
            gx: &gx,
            gy: &gy,
        };
        let ps = params.patch_size;
        let xs = patch_origins(w, ps, params.patch_stride);
        let ys = patch_origins(h, ps, params.patch_stride);
        let origins: Vec<(usize, usize)> = ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect();
        let centre = T::of_usize(ps - 1) * T::of(0.5);
        let patches: Vec<(usize, usize, T, T)> = origins
            .par_iter()
            .map(|&(x0, y0)| {
                let (cx, cy) = (T::of_usize(x0) + centre, T::of_usize(y0) + centre);
                let start = (init_x.sample(cx, cy), init_y.sample(cx, cy));
                let (u, v) = refine_patch(&lv, x0, y0, start, params);
                (x0, y0, u, v)
            })
            .collect();
        flow = Some(densify(w, h, ps, &patches));
    }
    Ok(flow.unwrap())
}
