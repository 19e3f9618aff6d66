//! Studentized range distribution.
//!
//! `P(Q > q)` is the expectation over the scaled chi variable `s` of the
//! upper tail of the range of `k` standard normals evaluated at `q * s`.
//! Both integrals use fixed Gauss-Legendre panels; the outer density is
//! normalised numerically over its truncated support.

use super::StatsError;
use crate::scalar::Real;
use crate::special::{ln_gamma, normal_cdf, normal_pdf};

/// 8-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

const Z_LIMIT: f64 = 8.5;
const Z_PANELS: usize = 34;
const S_PANELS: usize = 24;
const S_SPAN_SD: f64 = 8.0;

fn gauss_legendre_grid<T: Real>(lo: T, hi: T, panels: usize) -> Vec<(T, T)> {
    let width = (hi - lo) / T::of_usize(panels);
    let half = width / T::of(2.0);
    let mut out = Vec::with_capacity(panels * GL_NODES.len());
    for p in 0..panels {
        let mid = lo + width * T::of_usize(p) + half;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
            out.push((mid + half * T::of(*x), half * T::of(*w)));
        }
    }
    out
}

/// Pre-evaluated inner grid: node, weight * φ(z), Φ(z)^(k-1).
struct RangeKernel<T> {
    nodes: Vec<(T, T, T)>,
    km1: i32,
    k: T,
}

impl<T: Real> RangeKernel<T> {
    fn new(k: usize) -> Self {
        let km1 = (k - 1) as i32;
        let nodes = gauss_legendre_grid(T::of(-Z_LIMIT), T::of(Z_LIMIT), Z_PANELS)
            .into_iter()
            .map(|(z, w)| (z, w * normal_pdf(z), normal_cdf(z).powi(km1)))
            .collect();
        Self {
            nodes,
            km1,
            k: T::of_usize(k),
        }
    }

    /// `P(R > w)` for the range `R` of `k` standard normals.
    fn sf(&self, w: T) -> T {
        if !(w > T::zero()) {
            return T::one();
        }
        let mut acc = T::zero();
        for &(z, wphi, full) in &self.nodes {
            let inner = normal_cdf(z) - normal_cdf(z - w);
            acc = acc + wphi * (full - inner.max(T::zero()).powi(self.km1));
        }
        (self.k * acc).max(T::zero()).min(T::one())
    }
}

/// CDF of the range of `k` standard normals (infinite degrees of freedom).
pub fn srange_cdf_infinite_df<T: Real>(w: T, k: usize) -> T {
    T::one() - RangeKernel::new(k).sf(w)
}

/// Upper tail `P(Q_{k,df} > q)` of the studentized range distribution.
///
/// `df` may be `+inf`, in which case the range of normals is used directly.
pub fn srange_sf<T: Real>(q: T, k: usize, df: T) -> Result<T, StatsError> {
    if !q.is_finite() || df.is_nan() {
        return Err(StatsError::NonFinite);
    }
    if k < 2 {
        return Err(StatsError::InvalidArgument(format!("k = {k} < 2")));
    }
    if q < T::zero() || df < T::one() {
        return Err(StatsError::InvalidArgument(format!("q = {q}, df = {df} out of domain")));
    }
    if q == T::zero() {
        return Ok(T::one());
    }
    let kernel = RangeKernel::new(k);
    if df.is_infinite() {
        return Ok(kernel.sf(q));
    }

    // s = sqrt(chi2_df / df): density ∝ s^(df-1) exp(-df s^2 / 2)
    let two = T::of(2.0);
    let half_df = df / two;
    let mean_s = ((two / df).ln() / two + ln_gamma(half_df + T::of(0.5)) - ln_gamma(half_df)).exp();
    let sd_s = (T::one() - mean_s * mean_s).max(T::zero()).sqrt();
    let span = T::of(S_SPAN_SD) * sd_s;
    let lo = (mean_s - span).max(T::zero());
    let hi = mean_s + span;

    let grid = gauss_legendre_grid(lo, hi, S_PANELS);
    let log_density: Vec<T> = grid
        .iter()
        .map(|&(s, _)| (df - T::one()) * s.ln() - half_df * s * s)
        .collect();
    let peak = log_density.iter().copied().fold(T::neg_infinity(), T::max);
    let mut norm = T::zero();
    let mut acc = T::zero();
    for (&(s, w), &ld) in grid.iter().zip(log_density.iter()) {
        let weight = w * (ld - peak).exp();
        norm = norm + weight;
        acc = acc + weight * kernel.sf(q * s);
    }
    Ok((acc / norm).max(T::zero()).min(T::one()))
}
